//! Filtering algorithms for each propagator kind.

use num_integer::Integer;

use super::propagator::{LinRel, Operand, PropId, Propagator};
use super::store::{Conflict, PResult, Store};
use super::VarId;

fn mul(a: i64, b: i64) -> PResult<i64> {
    a.checked_mul(b).ok_or(Conflict::Overflow)
}

fn add(a: i64, b: i64) -> PResult<i64> {
    a.checked_add(b).ok_or(Conflict::Overflow)
}

fn sub(a: i64, b: i64) -> PResult<i64> {
    a.checked_sub(b).ok_or(Conflict::Overflow)
}

fn clamp(v: i128) -> i64 {
    v.clamp(i64::MIN as i128, i64::MAX as i128) as i64
}

impl Store {
    pub(crate) fn run_propagator(&mut self, pid: PropId, prop: &Propagator) -> PResult<()> {
        let entailed = match prop {
            Propagator::NeqOffset { x, y, c } => self.prop_neq_offset(*x, *y, *c)?,
            Propagator::Linear { terms, rel, rhs } => {
                if self.has_aliases() {
                    match self.canonical(prop) {
                        Propagator::Linear { terms, .. } => self.prop_linear(&terms, *rel, *rhs)?,
                        _ => unreachable!("canonical form keeps the kind"),
                    }
                } else {
                    self.prop_linear(terms, *rel, *rhs)?
                }
            }
            Propagator::ReifiedEq { b, x, rhs } => self.prop_reified_eq(*b, *x, *rhs)?,
            Propagator::AllDistinct(vs) => self.prop_all_distinct(vs)?,
            Propagator::LexLeq(xs, ys) => self.prop_lex_leq(xs, ys)?,
        };
        if entailed {
            self.entail(pid);
        }
        Ok(())
    }

    /// `x != y + c`
    fn prop_neq_offset(&mut self, x: VarId, y: VarId, c: i64) -> PResult<bool> {
        if self.find(x) == self.find(y) {
            return if c == 0 { Err(Conflict::Fail) } else { Ok(true) };
        }
        if let Some(vy) = self.value(y) {
            self.remove_value(x, add(vy, c)?)?;
            return Ok(true);
        }
        if let Some(vx) = self.value(x) {
            self.remove_value(y, sub(vx, c)?)?;
            return Ok(true);
        }
        Ok(false)
    }

    fn prop_linear(&mut self, terms: &[(i64, VarId)], rel: LinRel, rhs: i64) -> PResult<bool> {
        match rel {
            LinRel::Le => self.lin_le(terms, 1, rhs),
            LinRel::Eq => self.lin_eq(terms, rhs),
            LinRel::Ne => self.lin_ne(terms, rhs),
            // normalized away when posting
            LinRel::Lt | LinRel::Ge | LinRel::Gt => unreachable!("relation normalized at post"),
        }
    }

    /// Bounds filtering of `sum(sign * a * x) <= rhs`; returns entailment.
    fn lin_le(&mut self, terms: &[(i64, VarId)], sign: i64, rhs: i64) -> PResult<bool> {
        loop {
            let mut smin = 0i64;
            let mut smax = 0i64;
            for &(a, v) in terms {
                let a = mul(a, sign)?;
                let (lo, hi) = (self.min(v), self.max(v));
                let (mn, mx) = if a > 0 { (mul(a, lo)?, mul(a, hi)?) } else { (mul(a, hi)?, mul(a, lo)?) };
                smin = add(smin, mn)?;
                smax = add(smax, mx)?;
            }
            if smin > rhs {
                return Err(Conflict::Fail);
            }
            if smax <= rhs {
                return Ok(true);
            }
            let slack = sub(rhs, smin)?;
            let mut changed = false;
            for &(a, v) in terms {
                let a = mul(a, sign)?;
                let mn = if a > 0 { mul(a, self.min(v))? } else { mul(a, self.max(v))? };
                let cap = add(slack, mn)? as i128;
                if a > 0 {
                    changed |= self.restrict_max(v, clamp(Integer::div_floor(&cap, &(a as i128))))?;
                } else {
                    changed |= self.restrict_min(v, clamp(Integer::div_ceil(&cap, &(a as i128))))?;
                }
            }
            if !changed {
                return Ok(false);
            }
        }
    }

    fn lin_eq(&mut self, terms: &[(i64, VarId)], rhs: i64) -> PResult<bool> {
        let neg_rhs = rhs.checked_neg().ok_or(Conflict::Overflow)?;
        loop {
            let before: Vec<u64> = terms.iter().map(|t| self.domain(t.1).size()).collect();
            self.lin_le(terms, 1, rhs)?;
            self.lin_le(terms, -1, neg_rhs)?;
            if let [(a, x), (b, y)] = *terms {
                if a.abs() == 1 && b.abs() == 1 && x != y {
                    // a*x + b*y = rhs  =>  x = a*rhs - a*b*y
                    let dx = self.domain(y).affine(-a * b, mul(a, rhs)?).ok_or(Conflict::Overflow)?;
                    self.intersect_dom(x, &dx)?;
                    let dy = self.domain(x).affine(-a * b, mul(b, rhs)?).ok_or(Conflict::Overflow)?;
                    self.intersect_dom(y, &dy)?;
                }
            }
            let after: Vec<u64> = terms.iter().map(|t| self.domain(t.1).size()).collect();
            if before == after {
                return Ok(terms.iter().all(|t| self.is_fixed(t.1)));
            }
        }
    }

    fn lin_ne(&mut self, terms: &[(i64, VarId)], rhs: i64) -> PResult<bool> {
        let mut fixed_sum = 0i64;
        let mut free: Option<(i64, VarId)> = None;
        for &(a, v) in terms {
            match self.value(v) {
                Some(x) => fixed_sum = add(fixed_sum, mul(a, x)?)?,
                None if free.is_none() => free = Some((a, v)),
                None => return Ok(false),
            }
        }
        match free {
            None => {
                if fixed_sum == rhs {
                    Err(Conflict::Fail)
                } else {
                    Ok(true)
                }
            }
            Some((a, v)) => {
                let rest = sub(rhs, fixed_sum)?;
                if rest % a == 0 {
                    self.remove_value(v, rest / a)?;
                }
                Ok(true)
            }
        }
    }

    fn prop_reified_eq(&mut self, b: VarId, x: VarId, rhs: Operand) -> PResult<bool> {
        match rhs {
            Operand::Const(c) => match self.value(b) {
                Some(1) => {
                    self.fix(x, c)?;
                    Ok(true)
                }
                Some(_) => {
                    self.remove_value(x, c)?;
                    Ok(true)
                }
                None => {
                    if !self.domain(x).contains(c) {
                        self.fix(b, 0)?;
                        Ok(true)
                    } else if self.value(x) == Some(c) {
                        self.fix(b, 1)?;
                        Ok(true)
                    } else {
                        Ok(false)
                    }
                }
            },
            Operand::Var(y) => {
                if self.find(x) == self.find(y) {
                    self.fix(b, 1)?;
                    return Ok(true);
                }
                match self.value(b) {
                    Some(1) => {
                        let d = self.domain(x).intersect(self.domain(y));
                        self.set_domain(x, d.clone())?;
                        self.set_domain(y, d)?;
                        Ok(self.is_fixed(x))
                    }
                    Some(_) => {
                        if let Some(vx) = self.value(x) {
                            self.remove_value(y, vx)?;
                            Ok(true)
                        } else if let Some(vy) = self.value(y) {
                            self.remove_value(x, vy)?;
                            Ok(true)
                        } else {
                            Ok(false)
                        }
                    }
                    None => {
                        if self.domain(x).is_disjoint(self.domain(y)) {
                            self.fix(b, 0)?;
                            Ok(true)
                        } else if self.value(x).is_some() && self.value(x) == self.value(y) {
                            self.fix(b, 1)?;
                            Ok(true)
                        } else {
                            Ok(false)
                        }
                    }
                }
            }
        }
    }

    /// Value elimination plus Hall-interval bounds reasoning.
    fn prop_all_distinct(&mut self, vars: &[VarId]) -> PResult<bool> {
        let roots: Vec<VarId> = vars.iter().map(|v| self.find(*v)).collect();
        {
            let mut sorted = roots.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Conflict::Fail);
            }
        }
        let n = roots.len();
        loop {
            let mut changed = false;
            for i in 0..n {
                if let Some(val) = self.value(roots[i]) {
                    for (j, &other) in roots.iter().enumerate() {
                        if j != i {
                            changed |= self.remove_value(other, val)?;
                        }
                    }
                }
            }
            for (lo, hi) in self.hall_intervals(&roots)? {
                for &v in &roots {
                    let (mn, mx) = (self.min(v), self.max(v));
                    if mn >= lo && mx <= hi {
                        continue;
                    }
                    let nd = self.domain(v).remove_range(lo, hi);
                    changed |= self.set_domain(v, nd)?;
                }
            }
            if !changed {
                return Ok(roots.iter().all(|v| self.is_fixed(*v)));
            }
        }
    }

    /// Intervals `[lo, hi]` holding exactly `hi - lo + 1` variable ranges.
    fn hall_intervals(&self, vars: &[VarId]) -> PResult<Vec<(i64, i64)>> {
        let mut bounds: Vec<(i64, i64)> = vars.iter().map(|v| (self.min(*v), self.max(*v))).collect();
        bounds.sort_unstable_by_key(|b| b.1);
        let mut lows: Vec<i64> = bounds.iter().map(|b| b.0).collect();
        lows.sort_unstable();
        lows.dedup();
        let mut found = Vec::new();
        for &lo in &lows {
            let mut count: i128 = 0;
            let mut k = 0;
            while k < bounds.len() {
                let hi = bounds[k].1;
                while k < bounds.len() && bounds[k].1 == hi {
                    if bounds[k].0 >= lo {
                        count += 1;
                    }
                    k += 1;
                }
                if hi < lo || count == 0 {
                    continue;
                }
                let cap = hi as i128 - lo as i128 + 1;
                if count > cap {
                    return Err(Conflict::Fail);
                }
                if count == cap {
                    found.push((lo, hi));
                }
            }
        }
        Ok(found)
    }

    /// Lexicographic `xs <= ys`, filtering as the decomposition
    /// `x1 < y1 \/ (x1 = y1 /\ lex(rest))` would.
    fn prop_lex_leq(&mut self, xs: &[VarId], ys: &[VarId]) -> PResult<bool> {
        loop {
            let mut i = 0;
            while i < xs.len() && i < ys.len() && self.surely_equal(xs[i], ys[i]) {
                i += 1;
            }
            if i == xs.len() {
                return Ok(true);
            }
            if i == ys.len() {
                return Err(Conflict::Fail);
            }
            let (x, y) = (xs[i], ys[i]);
            if self.max(x) < self.min(y) {
                return Ok(true);
            }
            let strict = !self.tail_can_be_leq(xs, ys, i + 1);
            let off = if strict { 1 } else { 0 };
            let mut changed = self.restrict_max(x, sub(self.max(y), off)?)?;
            changed |= self.restrict_min(y, add(self.min(x), off)?)?;
            if !changed {
                return Ok(false);
            }
        }
    }

    fn surely_equal(&self, x: VarId, y: VarId) -> bool {
        self.find(x) == self.find(y) || (self.value(x).is_some() && self.value(x) == self.value(y))
    }

    /// Whether `xs[from..] <=lex ys[from..]` is still possible.
    fn tail_can_be_leq(&self, xs: &[VarId], ys: &[VarId], from: usize) -> bool {
        let mut j = from;
        loop {
            if j == xs.len() {
                return true;
            }
            if j == ys.len() {
                return false;
            }
            if self.find(xs[j]) != self.find(ys[j]) {
                let (xmin, ymax) = (self.min(xs[j]), self.max(ys[j]));
                if xmin > ymax {
                    return false;
                }
                if xmin < ymax {
                    return true;
                }
            }
            j += 1;
        }
    }
}
