use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::mpoly::MPoly;
use super::PoissonError;
use crate::rootdata::RootSystem;
use crate::scalar::{fmt_rational, Rational, Scalar};

static NEXT_SESSION: AtomicU64 = AtomicU64::new(0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    W,
    Y,
}

/// A chart generator `w_{node,r}` or `y_{node,r}` (0-based indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub kind: VarKind,
    pub node: usize,
    pub r: usize,
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.kind {
            VarKind::W => 'w',
            VarKind::Y => 'y',
        };
        write!(f, "{c}[{},{}]", self.node + 1, self.r + 1)
    }
}

/// The variable set of one `(root system, α)` chart. Variables are ordered
/// node by node, `w` before `y` within each coordinate pair.
#[derive(Debug)]
pub struct Session {
    id: u64,
    rs: RootSystem,
    alpha: Vec<usize>,
    vars: Vec<Var>,
}

impl Session {
    pub fn new(rs: RootSystem, alpha: Vec<usize>) -> Result<Arc<Self>, PoissonError> {
        if alpha.len() != rs.rank() {
            return Err(PoissonError::RankMismatch {
                expected: rs.rank(),
                got: alpha.len(),
            });
        }
        let mut vars = Vec::new();
        for (node, &a) in alpha.iter().enumerate() {
            for r in 0..a {
                vars.push(Var { kind: VarKind::W, node, r });
                vars.push(Var { kind: VarKind::Y, node, r });
            }
        }
        Ok(Arc::new(Session {
            id: NEXT_SESSION.fetch_add(1, Ordering::Relaxed),
            rs,
            alpha,
            vars,
        }))
    }

    pub fn root_system(&self) -> &RootSystem {
        &self.rs
    }

    pub fn alpha(&self) -> &[usize] {
        &self.alpha
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn index_of(&self, v: Var) -> Option<usize> {
        self.vars.iter().position(|&u| u == v)
    }

    pub fn w_index(&self, node: usize, r: usize) -> usize {
        self.index_of(Var { kind: VarKind::W, node, r })
            .expect("generator within alpha")
    }

    pub fn y_index(&self, node: usize, r: usize) -> usize {
        self.index_of(Var { kind: VarKind::Y, node, r })
            .expect("generator within alpha")
    }
}

/// Element of the field of rational functions on the chart, stored as a
/// polynomial numerator over a product of normalized polynomial factors.
#[derive(Clone)]
pub struct ChartExpr {
    session: Arc<Session>,
    num: MPoly,
    den: BTreeMap<MPoly, u32>,
}

impl fmt::Debug for ChartExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ChartExpr({self})")
    }
}

impl ChartExpr {
    pub fn session(&self) -> &Arc<Session> {
        &self.session
    }

    pub fn same_session(&self, other: &Self) -> bool {
        self.session.id == other.session.id
    }

    fn assert_same(&self, other: &Self) {
        assert!(
            self.same_session(other),
            "chart expressions from different sessions"
        );
    }

    pub fn constant(session: &Arc<Session>, c: Rational) -> Self {
        ChartExpr {
            session: session.clone(),
            num: MPoly::constant(session.nvars(), c),
            den: BTreeMap::new(),
        }
    }

    pub fn zero(session: &Arc<Session>) -> Self {
        Self::constant(session, Rational::zero())
    }

    pub fn one(session: &Arc<Session>) -> Self {
        Self::constant(session, Rational::one())
    }

    pub fn var(session: &Arc<Session>, k: usize) -> Self {
        ChartExpr {
            session: session.clone(),
            num: MPoly::var(session.nvars(), k),
            den: BTreeMap::new(),
        }
    }

    pub fn w(session: &Arc<Session>, node: usize, r: usize) -> Self {
        Self::var(session, session.w_index(node, r))
    }

    pub fn y(session: &Arc<Session>, node: usize, r: usize) -> Self {
        Self::var(session, session.y_index(node, r))
    }

    pub fn from_poly(session: &Arc<Session>, num: MPoly) -> Self {
        ChartExpr {
            session: session.clone(),
            num,
            den: BTreeMap::new(),
        }
    }

    pub fn numerator(&self) -> &MPoly {
        &self.num
    }

    pub fn denominator_factors(&self) -> &BTreeMap<MPoly, u32> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Cancels denominator factors that divide the numerator.
    fn simplify(mut self) -> Self {
        if self.num.is_zero() {
            self.den.clear();
            return self;
        }
        let factors: Vec<MPoly> = self.den.keys().cloned().collect();
        for f in factors {
            let e = self.den.get_mut(&f).expect("present");
            while *e > 0 {
                match self.num.div_exact(&f) {
                    Some(q) => {
                        self.num = q;
                        *e -= 1;
                    }
                    None => break,
                }
            }
            if *e == 0 {
                self.den.remove(&f);
            }
        }
        self
    }

    fn den_poly(den: &BTreeMap<MPoly, u32>, nvars: usize) -> MPoly {
        den.iter()
            .fold(MPoly::constant(nvars, Rational::one()), |acc, (f, &e)| acc.mul(&f.pow(e)))
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same(other);
        let n = self.session.nvars();
        let mut lcm = self.den.clone();
        for (f, &e) in &other.den {
            let slot = lcm.entry(f.clone()).or_insert(0);
            *slot = (*slot).max(e);
        }
        let lift = |x: &Self| -> MPoly {
            let missing: BTreeMap<MPoly, u32> = lcm
                .iter()
                .map(|(f, &e)| (f.clone(), e - x.den.get(f).copied().unwrap_or(0)))
                .filter(|(_, e)| *e > 0)
                .collect();
            x.num.mul(&Self::den_poly(&missing, n))
        };
        ChartExpr {
            session: self.session.clone(),
            num: lift(self).add(&lift(other)),
            den: lcm,
        }
        .simplify()
    }

    pub fn neg(&self) -> Self {
        ChartExpr {
            session: self.session.clone(),
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        ChartExpr {
            session: self.session.clone(),
            num: self.num.scale(c),
            den: self.den.clone(),
        }
        .simplify()
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same(other);
        let mut den = self.den.clone();
        for (f, &e) in &other.den {
            *den.entry(f.clone()).or_insert(0) += e;
        }
        ChartExpr {
            session: self.session.clone(),
            num: self.num.mul(&other.num),
            den,
        }
        .simplify()
    }

    pub fn inv(&self) -> Result<Self, PoissonError> {
        if self.num.is_zero() {
            return Err(PoissonError::DivisionByZero);
        }
        let n = self.session.nvars();
        let (c, monic) = self.num.normalize();
        let mut den = BTreeMap::new();
        if !monic.is_constant() {
            den.insert(monic, 1);
        }
        Ok(ChartExpr {
            session: self.session.clone(),
            num: Self::den_poly(&self.den, n).scale(&c.inv()),
            den,
        }
        .simplify())
    }

    pub fn div(&self, other: &Self) -> Result<Self, PoissonError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self, PoissonError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let k = e.unsigned_abs() as u32;
        if k == 0 {
            return Ok(Self::one(&self.session));
        }
        Ok(ChartExpr {
            session: self.session.clone(),
            num: base.num.pow(k),
            den: base.den.iter().map(|(f, &x)| (f.clone(), x * k)).collect(),
        })
    }

    /// Partial derivative in the `k`-th session variable.
    pub fn derivative(&self, k: usize) -> Self {
        let n = self.session.nvars();
        let moving: Vec<(&MPoly, u32, MPoly)> = self
            .den
            .iter()
            .map(|(f, &e)| (f, e, f.derivative(k)))
            .filter(|(_, _, df)| !df.is_zero())
            .collect();
        let dnum = self.num.derivative(k);
        if moving.is_empty() {
            return ChartExpr {
                session: self.session.clone(),
                num: dnum,
                den: self.den.clone(),
            }
            .simplify();
        }
        // d(N/∏D^e) = (N′·∏_K D − N·Σ_K e_k D_k′ ∏_{K∖k} D) / (∏ D^e · ∏_K D)
        let prod_moving = moving
            .iter()
            .fold(MPoly::constant(n, Rational::one()), |acc, (f, _, _)| acc.mul(f));
        let mut correction = MPoly::zero(n);
        for (idx, (_, e, df)) in moving.iter().enumerate() {
            let others = moving
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != idx)
                .fold(MPoly::constant(n, Rational::one()), |acc, (_, (g, _, _))| acc.mul(g));
            correction = correction.add(&df.mul(&others).scale(&Rational::from_i64(*e as i64)));
        }
        let num = dnum.mul(&prod_moving).sub(&self.num.mul(&correction));
        let mut den = self.den.clone();
        for (f, _, _) in &moving {
            *den.get_mut(*f).expect("present") += 1;
        }
        ChartExpr {
            session: self.session.clone(),
            num,
            den,
        }
        .simplify()
    }

    /// Evaluates at a point given by one value per session variable; `None`
    /// when a denominator factor vanishes.
    pub fn eval<S: Scalar>(&self, vals: &[S]) -> Option<S> {
        let mut den = S::one();
        for (f, &e) in &self.den {
            let v = f.eval(vals);
            if v.is_zero() {
                return None;
            }
            den = den * v.powi(e as i64);
        }
        Some(self.num.eval(vals) / den)
    }
}

fn fmt_poly(p: &MPoly, vars: &[Var]) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (e, c)) in p.terms().rev().enumerate() {
        let neg = c.is_negative();
        let mag = c.abs();
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mut factors: Vec<String> = Vec::new();
        let is_const = e.iter().all(|&x| x == 0);
        if !mag.is_one() || is_const {
            factors.push(if mag.is_integer() {
                mag.to_integer().to_string()
            } else {
                format!("({})", fmt_rational(&mag))
            });
        }
        for (v, &x) in e.iter().enumerate() {
            match x {
                0 => {}
                1 => factors.push(vars[v].to_string()),
                _ => factors.push(format!("{}^{x}", vars[v])),
            }
        }
        out.push_str(&factors.join("*"));
    }
    out
}

impl fmt::Display for ChartExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars = self.session.vars();
        let num = fmt_poly(&self.num, vars);
        if self.den.is_empty() {
            return f.write_str(&num);
        }
        write!(f, "({num})")?;
        for (p, e) in &self.den {
            write!(f, " * ({})^-{e}", fmt_poly(p, vars))?;
        }
        Ok(())
    }
}

impl PartialEq for ChartExpr {
    fn eq(&self, other: &Self) -> bool {
        self.same_session(other) && self.sub(other).is_zero()
    }
}
