use super::{Cell, ModelError, Value};

/// What the cells of an array hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElemKind {
    IntFd,
    BoolFd,
    Rat,
    Const,
}

impl ElemKind {
    fn admits(self, c: &Cell) -> bool {
        match self {
            ElemKind::IntFd | ElemKind::BoolFd => matches!(c, Cell::Fd(_) | Cell::Const(Value::Int(_))),
            ElemKind::Rat => matches!(c, Cell::Rat(_) | Cell::Const(Value::Int(_) | Value::Rat(_))),
            ElemKind::Const => matches!(c, Cell::Const(_)),
        }
    }

    /// Narrowest kind admitting every cell.
    pub fn of(cells: &[Cell]) -> Option<ElemKind> {
        [ElemKind::Const, ElemKind::IntFd, ElemKind::Rat].into_iter().find(|k| cells.iter().all(|c| k.admits(c)))
    }
}

/// Nested-list view of an array.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Nested {
    Leaf(Cell),
    List(Vec<Nested>),
}

/// An N-dimensional, 1-based array of cells stored flat in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrayVal {
    dims: Vec<usize>,
    cells: Vec<Cell>,
    kind: ElemKind,
}

impl ArrayVal {
    pub fn new(dims: Vec<usize>, cells: Vec<Cell>, kind: ElemKind) -> Result<Self, ModelError> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(ModelError::EmptyArray);
        }
        let n = dims.iter().try_fold(1usize, |acc, d| acc.checked_mul(*d)).ok_or(ModelError::Overflow)?;
        if n != cells.len() {
            return Err(ModelError::DimMismatch { left: dims, right: vec![cells.len()] });
        }
        if let Some(bad) = cells.iter().find(|c| !kind.admits(c)) {
            return Err(ModelError::KindMismatch(format!("{bad:?} in a {kind:?} array")));
        }
        Ok(ArrayVal { dims, cells, kind })
    }

    /// One-dimensional array over `cells`.
    pub fn from_list(cells: Vec<Cell>) -> Result<Self, ModelError> {
        let kind = ElemKind::of(&cells).ok_or(ModelError::MixedKind)?;
        ArrayVal::new(vec![cells.len()], cells, kind)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn kind(&self) -> ElemKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Row-major listing of every cell.
    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn to_list(&self) -> Vec<Cell> {
        self.cells.clone()
    }

    pub fn has_dims(&self, dims: &[usize]) -> bool {
        self.dims == dims
    }

    /// Flat offset of the block starting at the 1-based `prefix`.
    fn offset(&self, prefix: &[i64]) -> Result<usize, ModelError> {
        let mut off = 0usize;
        for (k, (&i, &d)) in prefix.iter().zip(&self.dims).enumerate() {
            if i < 1 || i as u64 > d as u64 {
                return Err(ModelError::IndexOutOfRange { dim: k + 1, got: i, size: d });
            }
            off = off * d + (i as usize - 1);
        }
        let rest: usize = self.dims[prefix.len()..].iter().product();
        Ok(off * rest)
    }

    /// The cell at 1-based `indices`; one index per dimension.
    pub fn cell(&self, indices: &[i64]) -> Result<&Cell, ModelError> {
        if indices.len() != self.dims.len() {
            return Err(ModelError::ArityMismatch { expected: self.dims.len(), got: indices.len() });
        }
        Ok(&self.cells[self.offset(indices)?])
    }

    /// The sub-array selected by a proper prefix of indices.
    pub fn subarray(&self, prefix: &[i64]) -> Result<ArrayVal, ModelError> {
        if prefix.is_empty() || prefix.len() >= self.dims.len() {
            return Err(ModelError::ArityMismatch { expected: self.dims.len(), got: prefix.len() });
        }
        let start = self.offset(prefix)?;
        let dims = self.dims[prefix.len()..].to_vec();
        let n: usize = dims.iter().product();
        Ok(ArrayVal { dims, cells: self.cells[start..start + n].to_vec(), kind: self.kind })
    }

    /// Lists of lists following the dimensions.
    pub fn to_lists(&self) -> Nested {
        fn build(cells: &[Cell], dims: &[usize]) -> Nested {
            match dims {
                [] => Nested::Leaf(cells[0].clone()),
                [d, rest @ ..] => {
                    let step = cells.len() / d;
                    Nested::List((0..*d).map(|k| build(&cells[k * step..(k + 1) * step], rest)).collect())
                }
            }
        }
        build(&self.cells, &self.dims)
    }

    /// Inverse of [`to_lists`](Self::to_lists); sibling lists must have equal shape.
    pub fn from_lists(nested: &Nested) -> Result<Self, ModelError> {
        fn shape(n: &Nested) -> Result<Vec<usize>, ModelError> {
            match n {
                Nested::Leaf(_) => Ok(Vec::new()),
                Nested::List(items) => {
                    let first = items.first().ok_or(ModelError::EmptyArray)?;
                    let inner = shape(first)?;
                    for it in &items[1..] {
                        let s = shape(it)?;
                        if s != inner {
                            return Err(ModelError::DimMismatch { left: inner, right: s });
                        }
                    }
                    Ok(std::iter::once(items.len()).chain(inner).collect())
                }
            }
        }
        fn flatten(n: &Nested, out: &mut Vec<Cell>) {
            match n {
                Nested::Leaf(c) => out.push(c.clone()),
                Nested::List(items) => items.iter().for_each(|it| flatten(it, out)),
            }
        }
        let dims = shape(nested)?;
        let mut cells = Vec::new();
        flatten(nested, &mut cells);
        let kind = ElemKind::of(&cells).ok_or(ModelError::MixedKind)?;
        ArrayVal::new(dims, cells, kind)
    }
}
