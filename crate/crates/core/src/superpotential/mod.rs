//! Master function, superpotential and its critical section.
//!
//! A configuration is a list of points `w_{i,r}` per node together with the
//! marked points `z_n`, colored by dominant coweights `λ_n`. The linear
//! functional `h*` enters only through its pairings `η_i = ⟨α_i, h*⟩` and
//! `θ_n = ⟨λ_n, h*⟩`.
//!
//! With `T_{i,r} = ∏_{j≠i} Q_j(w_{i,r})^{−A[i][j]/2}·K_i(w_{i,r})/Q′_i(w_{i,r})`
//! the superpotential of variant `(σ_s, σ_e)` is
//!
//! ```text
//! W = Σ θ_n z_n − Σ η_i w_{i,r} + σ_s Σ d_i s_{i,r} + Σ exp(σ_e s_{i,r}) T_{i,r}
//!     + Σ_{m<n} λ_m·λ_n log(z_m − z_n).
//! ```

mod newton;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

use crate::polyalg::RatPoly;
use crate::rootdata::{Coweight, PairingKind, RootSystem};
use crate::scalar::{Rational, Scalar};
use crate::zastava::{half_power, ZastavaError};

pub use newton::{newton_solve, solve_linear, NewtonOptions, NewtonResult};

type C = Complex64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SuperError {
    #[error("coweight λ_{n} is not dominant")]
    NonDominant { n: usize },
    #[error("coincident points: {0}")]
    CoincidentPoints(String),
    #[error("T_({i},{r}) = 0: the critical point escapes to infinity")]
    CriticalPointAtInfinity { i: usize, r: usize },
    #[error("shape mismatch: {0}")]
    RankMismatch(String),
    #[error("newton iteration did not converge (residual {residual:e})")]
    NonConvergence { residual: f64 },
    #[error(transparent)]
    Zastava(#[from] ZastavaError),
}

impl SuperError {
    pub fn name(&self) -> &'static str {
        match self {
            SuperError::NonDominant { .. } => "NonDominant",
            SuperError::CoincidentPoints(_) => "CoincidentPoints",
            SuperError::CriticalPointAtInfinity { .. } => "CriticalPointAtInfinity",
            SuperError::RankMismatch(_) => "RankMismatch",
            SuperError::NonConvergence { .. } => "NonConvergence",
            SuperError::Zastava(e) => e.name(),
        }
    }
}

/// Sign choices `(σ_s, σ_e)`; the printed superpotential is `(+,−)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Variant {
    pub s_sign: i8,
    pub exp_sign: i8,
}

impl Variant {
    pub const PLUS_PLUS: Variant = Variant { s_sign: 1, exp_sign: 1 };
    pub const PLUS_MINUS: Variant = Variant { s_sign: 1, exp_sign: -1 };
    pub const MINUS_PLUS: Variant = Variant { s_sign: -1, exp_sign: 1 };
    pub const MINUS_MINUS: Variant = Variant { s_sign: -1, exp_sign: -1 };
    pub const ALL: [Variant; 4] = [
        Variant::PLUS_PLUS,
        Variant::PLUS_MINUS,
        Variant::MINUS_PLUS,
        Variant::MINUS_MINUS,
    ];

    /// `σ = −σ_s σ_e`; at the critical point `exp(σ_e s)·T = σ d_i`.
    pub fn sigma(&self) -> i8 {
        -self.s_sign * self.exp_sign
    }

    /// Whether `W` restricted to its critical section has the gradient of Φ.
    pub fn restricts_to_phi(&self) -> bool {
        self.sigma() == -1
    }
}

impl Default for Variant {
    fn default() -> Self {
        Variant::PLUS_MINUS
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = |s: i8| if s > 0 { '+' } else { '-' };
        write!(f, "{}{}", c(self.s_sign), c(self.exp_sign))
    }
}

impl FromStr for Variant {
    type Err = String;

    /// Accepts `"+-"`, `"(+,-)"` and similar spellings.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let signs: Vec<i8> = s
            .chars()
            .filter_map(|c| match c {
                '+' => Some(1),
                '-' => Some(-1),
                _ => None,
            })
            .collect();
        let rest_ok = s.chars().all(|c| matches!(c, '+' | '-' | '(' | ')' | ',' | ' '));
        match (signs.as_slice(), rest_ok) {
            ([a, b], true) => Ok(Variant {
                s_sign: *a,
                exp_sign: *b,
            }),
            _ => Err(format!("malformed variant {s:?}; expected two signs such as \"+-\"")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuperParams<S> {
    pub rs: RootSystem,
    pub alpha: Vec<usize>,
    pub lambdas: Vec<Coweight>,
    pub z: Vec<S>,
    /// `η_i = ⟨α_i, h*⟩`.
    pub h_alpha: Vec<S>,
    /// `θ_n = ⟨λ_n, h*⟩`.
    pub h_lambda: Vec<S>,
    pub kappa: S,
    pub variant: Variant,
    alpha_lambda: Vec<Vec<Rational>>,
    lambda_lambda: Vec<Vec<Rational>>,
}

/// Gradient with respect to `w`, `z` and the two families of `h*` pairings.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient<S> {
    pub w: Vec<Vec<S>>,
    pub z: Vec<S>,
    pub h_alpha: Vec<S>,
    pub h_lambda: Vec<S>,
}

impl<S: Scalar> Gradient<S> {
    pub fn flatten(&self) -> Vec<S> {
        let mut out: Vec<S> = self.w.iter().flatten().cloned().collect();
        out.extend(self.z.iter().cloned());
        out.extend(self.h_alpha.iter().cloned());
        out.extend(self.h_lambda.iter().cloned());
        out
    }

    pub fn scale(&self, c: &S) -> Self {
        let f = |v: &S| v.clone() * c.clone();
        Gradient {
            w: self.w.iter().map(|n| n.iter().map(f).collect()).collect(),
            z: self.z.iter().map(f).collect(),
            h_alpha: self.h_alpha.iter().map(f).collect(),
            h_lambda: self.h_lambda.iter().map(f).collect(),
        }
    }
}

fn max_diff(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Reduces the imaginary part into `(−π, π]`.
pub fn reduce_mod_2pi_i(v: C) -> C {
    let mut im = v.im.rem_euclid(2.0 * PI);
    if im > PI {
        im -= 2.0 * PI;
    }
    C::new(v.re, im)
}

impl<S: Scalar> SuperParams<S> {
    /// When `h_lambda` is `None` it is derived from `h_alpha` by writing each
    /// `λ_n` in the coroot basis.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        rs: RootSystem,
        alpha: Vec<usize>,
        lambdas: Vec<Coweight>,
        z: Vec<S>,
        h_alpha: Vec<S>,
        h_lambda: Option<Vec<S>>,
        kappa: S,
        variant: Variant,
    ) -> Result<Self, SuperError> {
        let rank = rs.rank();
        if alpha.len() != rank || h_alpha.len() != rank {
            return Err(SuperError::RankMismatch(format!(
                "alpha and h_alpha need {rank} entries"
            )));
        }
        if lambdas.len() != z.len() {
            return Err(SuperError::RankMismatch(format!(
                "{} coweights but {} marked points",
                lambdas.len(),
                z.len()
            )));
        }
        for (n, lam) in lambdas.iter().enumerate() {
            if lam.pairings.len() != rank {
                return Err(SuperError::RankMismatch(format!(
                    "coweight {n} has {} pairings, expected {rank}",
                    lam.pairings.len()
                )));
            }
        }
        for m in 0..z.len() {
            for n in m + 1..z.len() {
                if z[m] == z[n] {
                    return Err(SuperError::CoincidentPoints(format!("z_{m} = z_{n}")));
                }
            }
        }
        let alpha_lambda = (0..rank)
            .map(|i| {
                lambdas
                    .iter()
                    .map(|l| rs.pairing(&PairingKind::RootCoweight(i, l.clone())).expect("checked"))
                    .collect()
            })
            .collect();
        let lambda_lambda = lambdas
            .iter()
            .map(|l| {
                lambdas
                    .iter()
                    .map(|m| {
                        rs.pairing(&PairingKind::CoweightCoweight(l.clone(), m.clone()))
                            .expect("checked")
                    })
                    .collect()
            })
            .collect();
        let h_lambda = match h_lambda {
            Some(v) if v.len() == lambdas.len() => v,
            Some(v) => {
                return Err(SuperError::RankMismatch(format!(
                    "h_lambda has {} entries, expected {}",
                    v.len(),
                    lambdas.len()
                )))
            }
            None => lambdas
                .iter()
                .map(|l| {
                    let c = rs.coroot_coords(l).expect("checked");
                    c.iter()
                        .zip(&h_alpha)
                        .fold(S::zero(), |acc, (cj, h)| acc + S::from_rational(cj) * h.clone())
                })
                .collect(),
        };
        Ok(SuperParams {
            rs,
            alpha,
            lambdas,
            z,
            h_alpha,
            h_lambda,
            kappa,
            variant,
            alpha_lambda,
            lambda_lambda,
        })
    }

    /// `α_i·λ_n`.
    pub fn alpha_dot_lambda(&self, i: usize, n: usize) -> &Rational {
        &self.alpha_lambda[i][n]
    }

    /// `λ_m·λ_n`.
    pub fn lambda_dot_lambda(&self, m: usize, n: usize) -> &Rational {
        &self.lambda_lambda[m][n]
    }

    pub fn with_variant(&self, variant: Variant) -> Self {
        SuperParams {
            variant,
            ..self.clone()
        }
    }

    pub fn map_scalars<T: Scalar>(&self, f: impl Fn(&S) -> T) -> SuperParams<T> {
        SuperParams {
            rs: self.rs.clone(),
            alpha: self.alpha.clone(),
            lambdas: self.lambdas.clone(),
            z: self.z.iter().map(&f).collect(),
            h_alpha: self.h_alpha.iter().map(&f).collect(),
            h_lambda: self.h_lambda.iter().map(&f).collect(),
            kappa: f(&self.kappa),
            variant: self.variant,
            alpha_lambda: self.alpha_lambda.clone(),
            lambda_lambda: self.lambda_lambda.clone(),
        }
    }

    /// Flattened `(i, r)` labels in node-major order.
    pub fn labels(&self) -> Vec<(usize, usize)> {
        self.alpha
            .iter()
            .enumerate()
            .flat_map(|(i, &a)| (0..a).map(move |r| (i, r)))
            .collect()
    }

    /// `K_i(z) = ∏_n (z − z_n)^{⟨λ_n, α̌_i⟩}`.
    pub fn k_polys(&self) -> Result<Vec<RatPoly<S>>, SuperError> {
        if let Some(n) = self.lambdas.iter().position(|l| !l.is_dominant()) {
            return Err(SuperError::NonDominant { n });
        }
        Ok((0..self.rs.rank())
            .map(|i| {
                self.lambdas
                    .iter()
                    .zip(&self.z)
                    .fold(RatPoly::one(), |acc, (l, zn)| {
                        let lin = RatPoly::new(vec![-zn.clone(), S::one()]);
                        &acc * &lin.pow(l.pairings[i] as u32)
                    })
            })
            .collect())
    }

    /// Checks the shape of `w` and that all points (`w`'s and `z`'s) are
    /// pairwise distinct.
    pub fn check_config(&self, w: &[Vec<S>]) -> Result<(), SuperError> {
        if w.len() != self.alpha.len() || w.iter().zip(&self.alpha).any(|(n, &a)| n.len() != a) {
            return Err(SuperError::RankMismatch(format!(
                "configuration shape does not match alpha = {:?}",
                self.alpha
            )));
        }
        let labels = self.labels();
        for (a, &(i, r)) in labels.iter().enumerate() {
            for &(j, s) in &labels[a + 1..] {
                if w[i][r] == w[j][s] {
                    return Err(SuperError::CoincidentPoints(format!(
                        "w_({i},{r}) = w_({j},{s})"
                    )));
                }
            }
            for (n, zn) in self.z.iter().enumerate() {
                if w[i][r] == *zn {
                    return Err(SuperError::CoincidentPoints(format!("w_({i},{r}) = z_{n}")));
                }
            }
        }
        Ok(())
    }

    fn q_polys(&self, w: &[Vec<S>]) -> Vec<RatPoly<S>> {
        w.iter().map(|n| RatPoly::from_roots(n)).collect()
    }

    /// `T²_{i,r} = ∏_{j≠i} Q_j(w)^{−A[i][j]}·K_i(w)²/Q′_i(w)²`, exact.
    pub fn t_squared(&self, w: &[Vec<S>]) -> Result<Vec<Vec<S>>, SuperError> {
        self.check_config(w)?;
        let ks = self.k_polys()?;
        let qs = self.q_polys(w);
        Ok(w.iter()
            .enumerate()
            .map(|(i, node)| {
                let dq = qs[i].derivative();
                node.iter()
                    .map(|x| {
                        let kq = ks[i].eval(x) / dq.eval(x);
                        (0..self.rs.rank())
                            .filter(|&j| j != i && self.rs.a(i, j) != 0)
                            .fold(kq.clone() * kq, |acc, j| acc * qs[j].eval(x).powi(-self.rs.a(i, j)))
                    })
                    .collect()
            })
            .collect())
    }

    /// `∂ log T_a / ∂ w_b` (flattened labels) and `∂ log T_a / ∂ z_n`.
    pub fn dlog_t(&self, w: &[Vec<S>]) -> Result<(Vec<Vec<S>>, Vec<Vec<S>>), SuperError> {
        self.check_config(w)?;
        let labels = self.labels();
        let half = |k: i64| S::from_rational(&Rational::new(k.into(), 2.into()));
        let mut dw = vec![vec![S::zero(); labels.len()]; labels.len()];
        let mut dz = vec![vec![S::zero(); self.z.len()]; labels.len()];
        for (a, &(i, r)) in labels.iter().enumerate() {
            let wa = &w[i][r];
            for (b, &(j, s)) in labels.iter().enumerate() {
                if a == b {
                    continue;
                }
                // log T_a contains −(A[i][j]/2)·log(w_a − w_b).
                let c = half(self.rs.a(i, j)) / (wa.clone() - w[j][s].clone());
                dw[a][a] = dw[a][a].clone() - c.clone();
                dw[a][b] = dw[a][b].clone() + c;
            }
            for (n, zn) in self.z.iter().enumerate() {
                let p = S::from_i64(self.lambdas[n].pairings[i]);
                let c = p / (wa.clone() - zn.clone());
                dw[a][a] = dw[a][a].clone() + c.clone();
                dz[a][n] = -c;
            }
        }
        Ok((dw, dz))
    }

    /// Gradient of the master function
    /// `Φ = Σ θ_n z_n − Σ η_i w + Σ_{a≠b} (α·α/2) log(w_a − w_b)
    ///      − Σ α_i·λ_n log(z_n − w) + Σ_{m<n} λ_m·λ_n log(z_m − z_n)`.
    pub fn phi_gradient(&self, w: &[Vec<S>]) -> Result<Gradient<S>, SuperError> {
        self.check_config(w)?;
        let q = |x: &Rational| S::from_rational(x);
        let labels = self.labels();
        let mut gw: Vec<Vec<S>> = w.iter().map(|n| vec![S::zero(); n.len()]).collect();
        let mut gz: Vec<S> = self.h_lambda.clone();
        for &(i, r) in &labels {
            let mut acc = -self.h_alpha[i].clone();
            for &(j, s) in &labels {
                if (i, r) == (j, s) {
                    continue;
                }
                acc = acc + S::from_i64(self.rs.dot(i, j)) / (w[i][r].clone() - w[j][s].clone());
            }
            for (n, zn) in self.z.iter().enumerate() {
                let c = q(&self.alpha_lambda[i][n]) / (zn.clone() - w[i][r].clone());
                acc = acc + c.clone();
                gz[n] = gz[n].clone() - c;
            }
            gw[i][r] = acc;
        }
        for n in 0..self.z.len() {
            for m in 0..self.z.len() {
                if m != n {
                    gz[n] = gz[n].clone()
                        + q(&self.lambda_lambda[m][n]) / (self.z[n].clone() - self.z[m].clone());
                }
            }
        }
        let h_alpha = w
            .iter()
            .map(|n| n.iter().fold(S::zero(), |acc, x| acc - x.clone()))
            .collect();
        Ok(Gradient {
            w: gw,
            z: gz,
            h_alpha,
            h_lambda: self.z.clone(),
        })
    }

    /// Exponent data of the open-stratum generator.
    pub fn exponent_table(&self) -> Vec<ExponentEntry<S>> {
        let labels = self.labels();
        let k = &self.kappa;
        let q = |x: &Rational| S::from_rational(x);
        let mut out = Vec::new();
        for (n, th) in self.h_lambda.iter().enumerate() {
            out.push(ExponentEntry {
                factor: Factor::ExpZ(n),
                exponent: k.clone() * th.clone(),
            });
        }
        for &(i, r) in &labels {
            out.push(ExponentEntry {
                factor: Factor::ExpW(i, r),
                exponent: -(k.clone() * self.h_alpha[i].clone()),
            });
        }
        for &(i, r) in &labels {
            for &(j, s) in &labels {
                if (i, r) != (j, s) {
                    out.push(ExponentEntry {
                        factor: Factor::WW((i, r), (j, s)),
                        exponent: k.clone() * S::from_rational(&Rational::new(self.rs.dot(i, j).into(), 2.into())),
                    });
                }
            }
        }
        for &(i, r) in &labels {
            for n in 0..self.z.len() {
                out.push(ExponentEntry {
                    factor: Factor::ZW(n, (i, r)),
                    exponent: -(k.clone() * q(&self.alpha_lambda[i][n])),
                });
            }
        }
        for m in 0..self.z.len() {
            for n in m + 1..self.z.len() {
                out.push(ExponentEntry {
                    factor: Factor::ZZ(m, n),
                    exponent: k.clone() * q(&self.lambda_lambda[m][n]),
                });
            }
        }
        out
    }

    /// Logarithmic derivative of `∏ factor^exponent` in every variable.
    /// The `h*` derivatives use that the `ExpZ`/`ExpW` exponents are `κθ_n`
    /// and `−κη_i`.
    pub fn exponent_log_derivative(
        &self,
        table: &[ExponentEntry<S>],
        w: &[Vec<S>],
    ) -> Result<Gradient<S>, SuperError> {
        self.check_config(w)?;
        let mut g = Gradient {
            w: w.iter().map(|n| vec![S::zero(); n.len()]).collect(),
            z: vec![S::zero(); self.z.len()],
            h_alpha: vec![S::zero(); self.rs.rank()],
            h_lambda: vec![S::zero(); self.z.len()],
        };
        let add = |slot: &mut S, v: S| *slot = slot.clone() + v;
        for e in table {
            let x = e.exponent.clone();
            match e.factor {
                Factor::ExpZ(n) => {
                    add(&mut g.z[n], x);
                    add(&mut g.h_lambda[n], self.kappa.clone() * self.z[n].clone());
                }
                Factor::ExpW(i, r) => {
                    add(&mut g.w[i][r], x);
                    add(&mut g.h_alpha[i], -(self.kappa.clone() * w[i][r].clone()));
                }
                Factor::WW((i, r), (j, s)) => {
                    let c = x / (w[i][r].clone() - w[j][s].clone());
                    add(&mut g.w[i][r], c.clone());
                    add(&mut g.w[j][s], -c);
                }
                Factor::ZW(n, (i, r)) => {
                    let c = x / (self.z[n].clone() - w[i][r].clone());
                    add(&mut g.z[n], c.clone());
                    add(&mut g.w[i][r], -c);
                }
                Factor::ZZ(m, n) => {
                    let c = x / (self.z[m].clone() - self.z[n].clone());
                    add(&mut g.z[m], c.clone());
                    add(&mut g.z[n], -c);
                }
            }
        }
        Ok(g)
    }
}

/// A factor of the open-stratum generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    /// `exp(z_n)`.
    ExpZ(usize),
    /// `exp(w_{i,r})`.
    ExpW(usize, usize),
    /// `w_a − w_b`.
    WW((usize, usize), (usize, usize)),
    /// `z_n − w_a`.
    ZW(usize, (usize, usize)),
    /// `z_m − z_n`.
    ZZ(usize, usize),
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = |(i, r): (usize, usize)| format!("w[{},{}]", i + 1, r + 1);
        match *self {
            Factor::ExpZ(n) => write!(f, "exp(z[{}])", n + 1),
            Factor::ExpW(i, r) => write!(f, "exp({})", w((i, r))),
            Factor::WW(a, b) => write!(f, "{}-{}", w(a), w(b)),
            Factor::ZW(n, a) => write!(f, "z[{}]-{}", n + 1, w(a)),
            Factor::ZZ(m, n) => write!(f, "z[{}]-z[{}]", m + 1, n + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentEntry<S> {
    pub factor: Factor,
    pub exponent: S,
}

/// Closed-form critical section and its stationarity data.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalSection {
    pub variant: Variant,
    pub s: Vec<Vec<C>>,
    pub t: Vec<Vec<C>>,
    /// `max |∂W/∂s|` at `s`.
    pub stationarity: f64,
    /// Diagonal of the `s`-Hessian, `exp(σ_e s)·T`.
    pub hessian_diag: Vec<C>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonAgreement {
    pub seed_index: usize,
    pub converged: bool,
    pub iterations: usize,
    pub residual: f64,
    /// `max |s_newton − s*|` after reducing modulo `2πi`.
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedGradient {
    pub variant: Variant,
    pub section: Gradient<C>,
    pub phi: Gradient<C>,
    /// `max` difference over the `w` and `z` components.
    pub wz_mismatch: f64,
    /// `max` difference over the `h*` components.
    pub h_mismatch: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianDefect {
    pub variant: Variant,
    /// `G_ab = ď_a⁻¹·∂s*_a/∂w_b`, analytic.
    pub g: Vec<Vec<C>>,
    /// Same from central finite differences.
    pub g_fd: Vec<Vec<C>>,
    pub fd_error: f64,
    /// `G − Gᵀ`.
    pub defect: Vec<Vec<C>>,
    /// `−σ_e (α_a·α_b/d)/(w_a − w_b)`.
    pub defect_closed_form: Vec<Vec<C>>,
    pub closed_form_error: f64,
    pub defect_norm: f64,
}

impl LagrangianDefect {
    pub fn vanishes(&self, tol: f64) -> bool {
        self.defect_norm <= tol
    }
}

impl SuperParams<C> {
    /// `T_{i,r}` with principal half powers.
    pub fn t_values(&self, w: &[Vec<C>]) -> Result<Vec<Vec<C>>, SuperError> {
        self.check_config(w)?;
        let ks = self.k_polys()?;
        let qs = self.q_polys(w);
        Ok(w.iter()
            .enumerate()
            .map(|(i, node)| {
                let dq = qs[i].derivative();
                node.iter()
                    .map(|x| {
                        (0..self.rs.rank())
                            .filter(|&j| j != i && self.rs.a(i, j) != 0)
                            .fold(ks[i].eval(x) / dq.eval(x), |acc, j| {
                                acc * half_power(qs[j].eval(x), -self.rs.a(i, j))
                            })
                    })
                    .collect()
            })
            .collect())
    }

    /// Φ on principal branches.
    pub fn phi_value(&self, w: &[Vec<C>]) -> Result<C, SuperError> {
        self.check_config(w)?;
        let labels = self.labels();
        let q = |x: &Rational| Rational::to_complex(x);
        let mut v = C::new(0.0, 0.0);
        for (n, zn) in self.z.iter().enumerate() {
            v += self.h_lambda[n] * zn;
        }
        for &(i, r) in &labels {
            v -= self.h_alpha[i] * w[i][r];
            for &(j, s) in &labels {
                if (i, r) != (j, s) {
                    v += (self.rs.dot(i, j) as f64 / 2.0) * (w[i][r] - w[j][s]).ln();
                }
            }
            for (n, zn) in self.z.iter().enumerate() {
                v -= q(&self.alpha_lambda[i][n]) * (zn - w[i][r]).ln();
            }
        }
        v += self.zz_log_terms();
        Ok(v)
    }

    fn zz_log_terms(&self) -> C {
        let mut v = C::new(0.0, 0.0);
        for m in 0..self.z.len() {
            for n in m + 1..self.z.len() {
                v += self.lambda_lambda[m][n].to_complex() * (self.z[m] - self.z[n]).ln();
            }
        }
        v
    }

    /// `W(h*, w, s, z)` on principal branches.
    pub fn w_value(&self, w: &[Vec<C>], s: &[Vec<C>]) -> Result<C, SuperError> {
        let t = self.t_values(w)?;
        self.check_s(s)?;
        let (ss, es) = (self.variant.s_sign as f64, self.variant.exp_sign as f64);
        let mut v = C::new(0.0, 0.0);
        for (n, zn) in self.z.iter().enumerate() {
            v += self.h_lambda[n] * zn;
        }
        for (i, r) in self.labels() {
            v -= self.h_alpha[i] * w[i][r];
            v += ss * self.rs.d_i(i) as f64 * s[i][r];
            v += (es * s[i][r]).exp() * t[i][r];
        }
        Ok(v + self.zz_log_terms())
    }

    fn check_s(&self, s: &[Vec<C>]) -> Result<(), SuperError> {
        if s.len() != self.alpha.len() || s.iter().zip(&self.alpha).any(|(n, &a)| n.len() != a) {
            return Err(SuperError::RankMismatch("log coordinates do not match alpha".into()));
        }
        Ok(())
    }

    /// `∂W/∂s_{i,r} = σ_s d_i + σ_e exp(σ_e s)·T`.
    pub fn w_gradient_s(&self, w: &[Vec<C>], s: &[Vec<C>]) -> Result<Vec<Vec<C>>, SuperError> {
        let t = self.t_values(w)?;
        self.check_s(s)?;
        Ok(self.grad_s_from_t(&t, s))
    }

    fn grad_s_from_t(&self, t: &[Vec<C>], s: &[Vec<C>]) -> Vec<Vec<C>> {
        let (ss, es) = (self.variant.s_sign as f64, self.variant.exp_sign as f64);
        t.iter()
            .enumerate()
            .map(|(i, node)| {
                node.iter()
                    .zip(&s[i])
                    .map(|(ti, si)| ss * self.rs.d_i(i) as f64 + es * (es * si).exp() * ti)
                    .collect()
            })
            .collect()
    }

    /// Partial gradient of `W` in `w`, `z` and `h*` at fixed `s`.
    pub fn w_gradient(&self, w: &[Vec<C>], s: &[Vec<C>]) -> Result<Gradient<C>, SuperError> {
        let t = self.t_values(w)?;
        self.check_s(s)?;
        let (dw, dz) = self.dlog_t(w)?;
        let labels = self.labels();
        let es = self.variant.exp_sign as f64;
        // exp(σ_e s_a)·T_a, the coefficient of ∂ log T_a.
        let weight: Vec<C> = labels
            .iter()
            .map(|&(i, r)| (es * s[i][r]).exp() * t[i][r])
            .collect();
        let mut gw: Vec<Vec<C>> = w.iter().map(|n| vec![C::new(0.0, 0.0); n.len()]).collect();
        for (b, &(j, s_)) in labels.iter().enumerate() {
            let mut acc = -self.h_alpha[j];
            for a in 0..labels.len() {
                acc += weight[a] * dw[a][b];
            }
            gw[j][s_] = acc;
        }
        let mut gz = self.h_lambda.clone();
        for (n, g) in gz.iter_mut().enumerate() {
            for a in 0..labels.len() {
                *g += weight[a] * dz[a][n];
            }
            for m in 0..self.z.len() {
                if m != n {
                    *g += self.lambda_lambda[m][n].to_complex() / (self.z[n] - self.z[m]);
                }
            }
        }
        Ok(Gradient {
            w: gw,
            z: gz,
            h_alpha: w.iter().map(|n| -n.iter().sum::<C>()).collect(),
            h_lambda: self.z.clone(),
        })
    }

    /// `s*_{i,r} = σ_e·(Log(σ d_i) − Log T_{i,r})`.
    pub fn critical_section(&self, w: &[Vec<C>]) -> Result<CriticalSection, SuperError> {
        let t = self.t_values(w)?;
        let sigma = self.variant.sigma() as f64;
        let es = self.variant.exp_sign as f64;
        let mut s = Vec::with_capacity(t.len());
        for (i, node) in t.iter().enumerate() {
            let mut row = Vec::with_capacity(node.len());
            for (r, ti) in node.iter().enumerate() {
                if ti.norm() == 0.0 || !ti.is_finite() {
                    return Err(SuperError::CriticalPointAtInfinity { i, r });
                }
                let target = C::new(sigma * self.rs.d_i(i) as f64, 0.0);
                row.push(es * (target.ln() - ti.ln()));
            }
            s.push(row);
        }
        let g = self.grad_s_from_t(&t, &s);
        let stationarity = g.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
        let hessian_diag = t
            .iter()
            .zip(&s)
            .flat_map(|(tn, sn)| tn.iter().zip(sn).map(|(ti, si)| (es * si).exp() * ti))
            .collect();
        Ok(CriticalSection {
            variant: self.variant,
            s,
            t,
            stationarity,
            hessian_diag,
        })
    }

    /// Newton solve of `∇_s W = 0` from `init`, compared to the closed form.
    pub fn newton_section(
        &self,
        w: &[Vec<C>],
        init: &[C],
        opts: &NewtonOptions,
        seed_index: usize,
    ) -> Result<NewtonAgreement, SuperError> {
        let crit = self.critical_section(w)?;
        let t: Vec<C> = crit.t.iter().flatten().copied().collect();
        let d: Vec<f64> = self
            .labels()
            .iter()
            .map(|&(i, _)| self.rs.d_i(i) as f64)
            .collect();
        let (ss, es) = (self.variant.s_sign as f64, self.variant.exp_sign as f64);
        let f = |x: &[C]| -> Vec<C> {
            x.iter()
                .zip(&t)
                .zip(&d)
                .map(|((xi, ti), di)| ss * di + es * (es * xi).exp() * ti)
                .collect()
        };
        let jac = |x: &[C]| -> Vec<Vec<C>> {
            let n = x.len();
            (0..n)
                .map(|k| {
                    (0..n)
                        .map(|l| {
                            if k == l {
                                (es * x[k]).exp() * t[k]
                            } else {
                                C::new(0.0, 0.0)
                            }
                        })
                        .collect()
                })
                .collect()
        };
        let res = newton_solve(f, jac, init.to_vec(), opts);
        let star: Vec<C> = crit.s.iter().flatten().copied().collect();
        let distance = res
            .x
            .iter()
            .zip(&star)
            .map(|(a, b)| reduce_mod_2pi_i(a - b).norm())
            .fold(0.0, f64::max);
        Ok(NewtonAgreement {
            seed_index,
            converged: res.converged,
            iterations: res.iterations,
            residual: res.residual,
            distance,
        })
    }

    /// Gradient of `W` along the critical section versus the gradient of Φ.
    pub fn restricted_gradient(&self, w: &[Vec<C>]) -> Result<RestrictedGradient, SuperError> {
        let crit = self.critical_section(w)?;
        let section = self.w_gradient(w, &crit.s)?;
        let phi = self.phi_gradient(w)?;
        let (sf, pf) = (section.flatten(), phi.flatten());
        let nwz = section.w.iter().map(Vec::len).sum::<usize>() + section.z.len();
        Ok(RestrictedGradient {
            variant: self.variant,
            wz_mismatch: max_diff(&sf[..nwz], &pf[..nwz]),
            h_mismatch: max_diff(&sf[nwz..], &pf[nwz..]),
            section,
            phi,
        })
    }

    fn section_flat(&self, w: &[Vec<C>]) -> Result<Vec<C>, SuperError> {
        Ok(self.critical_section(w)?.s.into_iter().flatten().collect())
    }

    /// Antisymmetrized pullback coefficients of `Σ ď_i⁻¹ ds ∧ dw` under the
    /// critical section, with a finite-difference cross-check.
    pub fn lagrangian_defect(&self, w: &[Vec<C>], step: f64) -> Result<LagrangianDefect, SuperError> {
        let labels = self.labels();
        let n = labels.len();
        let (dw, _) = self.dlog_t(w)?;
        let es = self.variant.exp_sign as f64;
        let dinv: Vec<f64> = labels
            .iter()
            .map(|&(i, _)| 1.0 / Rational::to_complex(&self.rs.dcheck(i)).re)
            .collect();
        let g: Vec<Vec<C>> = (0..n)
            .map(|a| (0..n).map(|b| dinv[a] * (-es) * dw[a][b]).collect())
            .collect();

        let mut g_fd = vec![vec![C::new(0.0, 0.0); n]; n];
        for (b, &(j, s)) in labels.iter().enumerate() {
            let mut plus = w.to_vec();
            let mut minus = w.to_vec();
            plus[j][s] += step;
            minus[j][s] -= step;
            let sp = self.section_flat(&plus)?;
            let sm = self.section_flat(&minus)?;
            for a in 0..n {
                g_fd[a][b] = dinv[a] * reduce_mod_2pi_i(sp[a] - sm[a]) / (2.0 * step);
            }
        }
        let fd_error = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .map(|(a, b)| (g[a][b] - g_fd[a][b]).norm())
            .fold(0.0, f64::max);

        let defect: Vec<Vec<C>> = (0..n)
            .map(|a| (0..n).map(|b| g[a][b] - g[b][a]).collect())
            .collect();
        let d = self.rs.d() as f64;
        let defect_closed_form: Vec<Vec<C>> = labels
            .iter()
            .map(|&(i, r)| {
                labels
                    .iter()
                    .map(|&(j, s)| {
                        if (i, r) == (j, s) {
                            C::new(0.0, 0.0)
                        } else {
                            -es * (self.rs.dot(i, j) as f64 / d) / (w[i][r] - w[j][s])
                        }
                    })
                    .collect()
            })
            .collect();
        let closed_form_error = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .map(|(a, b)| (defect[a][b] - defect_closed_form[a][b]).norm())
            .fold(0.0, f64::max);
        let defect_norm = defect.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
        Ok(LagrangianDefect {
            variant: self.variant,
            g,
            g_fd,
            fd_error,
            defect,
            defect_closed_form,
            closed_form_error,
            defect_norm,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn a1_params(variant: Variant, h: C) -> SuperParams<C> {
        SuperParams::new(
            RootSystem::named("A1").unwrap(),
            vec![1],
            vec![Coweight::new(vec![2])],
            vec![c(0.0, 0.0)],
            vec![h],
            None,
            c(1.0, 0.0),
            variant,
        )
        .unwrap()
    }

    #[test]
    fn k_poly_examples() {
        let rs = RootSystem::named("A1").unwrap();
        let p = SuperParams::new(
            rs.clone(),
            vec![1],
            vec![Coweight::new(vec![2])],
            vec![int(0)],
            vec![int(1)],
            None,
            int(1),
            Variant::default(),
        )
        .unwrap();
        assert_eq!(p.k_polys().unwrap()[0], RatPoly::monomial(int(1), 2));
        let empty = SuperParams::new(rs.clone(), vec![1], vec![], vec![], vec![int(1)], None, int(1), Variant::default()).unwrap();
        assert_eq!(empty.k_polys().unwrap()[0], RatPoly::one());
        let two = SuperParams::new(
            rs.clone(),
            vec![1],
            vec![Coweight::new(vec![1]), Coweight::new(vec![1])],
            vec![int(0), int(1)],
            vec![int(1)],
            None,
            int(1),
            Variant::default(),
        )
        .unwrap();
        assert_eq!(two.k_polys().unwrap()[0], RatPoly::new(vec![int(0), int(-1), int(1)]));
        let bad = SuperParams::new(rs, vec![1], vec![Coweight::new(vec![-1])], vec![int(0)], vec![int(1)], None, int(1), Variant::default()).unwrap();
        assert_eq!(bad.k_polys().unwrap_err(), SuperError::NonDominant { n: 0 });
        // θ derived from η by linearity: λ = α, so θ = η.
        assert_eq!(two.h_lambda, vec![rat(1, 2), rat(1, 2)]);
    }

    #[test]
    fn phi_gradient_a1_example() {
        let h = c(0.3, -0.2);
        let p = a1_params(Variant::PLUS_PLUS, h);
        let w = vec![vec![c(1.5, 0.5)]];
        let g = p.phi_gradient(&w).unwrap();
        let expect = -h - 2.0 / w[0][0];
        assert!((g.w[0][0] - expect).norm() < 1e-14);
    }

    #[test]
    fn critical_section_a1() {
        let w = vec![vec![c(1.5, 0.5)]];
        let p = a1_params(Variant::PLUS_MINUS, c(0.3, 0.0));
        let crit = p.critical_section(&w).unwrap();
        let expect = (w[0][0] * w[0][0]).ln();
        assert!(reduce_mod_2pi_i(crit.s[0][0] - expect).norm() < 1e-14);
        for v in Variant::ALL {
            let crit = p.with_variant(v).critical_section(&w).unwrap();
            assert!(crit.stationarity < 1e-12, "{v}");
        }
    }

    #[test]
    fn restricted_gradient_a1() {
        let w = vec![vec![c(1.5, 0.5)]];
        let h = c(0.3, 0.1);
        let pp = a1_params(Variant::PLUS_PLUS, h).restricted_gradient(&w).unwrap();
        assert!(pp.wz_mismatch < 1e-12);
        assert!(pp.h_mismatch < 1e-12);
        let pm = a1_params(Variant::PLUS_MINUS, h).restricted_gradient(&w).unwrap();
        let diff = pm.section.w[0][0] - pm.phi.w[0][0];
        assert!((diff - 4.0 / w[0][0]).norm() < 1e-12);
        assert!(pm.h_mismatch < 1e-12);
    }

    #[test]
    fn lagrangian_defect_a1_vanishes() {
        let p = a1_params(Variant::PLUS_MINUS, c(0.3, 0.1));
        let rep = p.lagrangian_defect(&[vec![c(1.5, 0.5)]], 1e-5).unwrap();
        assert!(rep.vanishes(1e-15));
        assert!(rep.fd_error < 1e-7);
    }

    #[test]
    fn variant_parsing() {
        assert_eq!("+-".parse::<Variant>().unwrap(), Variant::PLUS_MINUS);
        assert_eq!("(-,+)".parse::<Variant>().unwrap(), Variant::MINUS_PLUS);
        assert!("+".parse::<Variant>().is_err());
        assert!("+x-".parse::<Variant>().is_err());
        assert_eq!(Variant::MINUS_MINUS.to_string(), "--");
        assert!(Variant::PLUS_PLUS.restricts_to_phi());
        assert!(!Variant::PLUS_MINUS.restricts_to_phi());
    }

    #[test]
    fn exponent_table_a2() {
        let p = SuperParams::new(
            RootSystem::named("A2").unwrap(),
            vec![1, 1],
            vec![],
            vec![],
            vec![int(0), int(0)],
            None,
            int(1),
            Variant::default(),
        )
        .unwrap();
        let ww: Vec<_> = p
            .exponent_table()
            .into_iter()
            .filter(|e| matches!(e.factor, Factor::WW(..)))
            .collect();
        assert_eq!(ww.len(), 2);
        assert!(ww.iter().all(|e| e.exponent == rat(-1, 2)));
        let w = vec![vec![int(1)], vec![int(3)]];
        let g = p.exponent_log_derivative(&p.exponent_table(), &w).unwrap();
        assert_eq!(g, p.phi_gradient(&w).unwrap());
    }

    fn mixed(name: &str, alpha: Vec<usize>, lam: Vec<i64>, variant: Variant) -> SuperParams<C> {
        let rank = alpha.len();
        SuperParams::new(
            RootSystem::named(name).unwrap(),
            alpha,
            vec![Coweight::new(lam)],
            vec![c(-0.4, 0.9)],
            (0..rank).map(|i| c(0.2 + i as f64, -0.1)).collect(),
            None,
            c(1.0, 0.0),
            variant,
        )
        .unwrap()
    }

    #[test]
    fn g2_section_is_stationary() {
        let p = mixed("G2", vec![2, 1], vec![1, 2], Variant::PLUS_MINUS);
        assert_eq!(p.rs.d(), 3);
        let w = vec![vec![c(1.1, 0.3), c(-0.7, 1.4)], vec![c(0.5, -1.2)]];
        for v in Variant::ALL {
            let crit = p.with_variant(v).critical_section(&w).unwrap();
            assert!(crit.stationarity < 1e-12, "{v}: {}", crit.stationarity);
        }
    }

    #[test]
    fn b2_and_g2_sections_match_phi_for_sigma_minus_one() {
        let cases = [
            ("B2", vec![vec![c(1.1, 0.3), c(-0.7, 1.4)], vec![c(0.5, -1.2)]]),
            ("G2", vec![vec![c(1.1, 0.3)], vec![c(0.5, -1.2), c(2.0, 0.6)]]),
            ("A2", vec![vec![c(1.1, 0.3)], vec![c(0.5, -1.2)]]),
        ];
        for (name, w) in cases {
            let alpha: Vec<usize> = w.iter().map(Vec::len).collect();
            for v in Variant::ALL {
                let p = mixed(name, alpha.clone(), vec![1, 1], v);
                let rep = p.restricted_gradient(&w).unwrap();
                assert!(rep.h_mismatch < 1e-12);
                assert_eq!(rep.wz_mismatch < 1e-10, v.restricts_to_phi(), "{name} {v}: {}", rep.wz_mismatch);
                let lag = p.lagrangian_defect(&w, 1e-5).unwrap();
                assert!(lag.closed_form_error < 1e-12, "{name} {v}");
                assert!(lag.fd_error < 1e-6, "{name} {v}: {}", lag.fd_error);
            }
        }
    }

    #[test]
    fn w_gradient_matches_finite_differences() {
        let p = mixed("B2", vec![2, 1], vec![1, 1], Variant::PLUS_MINUS);
        let w = vec![vec![c(1.1, 0.3), c(-0.7, 1.4)], vec![c(0.5, -1.2)]];
        let s = vec![vec![c(0.2, 0.1), c(-0.3, 0.4)], vec![c(0.1, -0.2)]];
        let g = p.w_gradient(&w, &s).unwrap();
        let h = 1e-6;
        for (i, r) in p.labels() {
            let mut wp = w.clone();
            let mut wm = w.clone();
            wp[i][r] += h;
            wm[i][r] -= h;
            let fd = (p.w_value(&wp, &s).unwrap() - p.w_value(&wm, &s).unwrap()) / (2.0 * h);
            assert!((fd - g.w[i][r]).norm() < 1e-6, "{i},{r}");
        }
    }

    #[test]
    fn newton_agrees_with_closed_form() {
        let p = mixed("A2", vec![1, 1], vec![1, 0], Variant::PLUS_MINUS);
        let w = vec![vec![c(1.1, 0.3)], vec![c(0.5, -1.2)]];
        let rep = p
            .newton_section(&w, &[c(-2.5, 3.0), c(2.9, -3.1)], &NewtonOptions::default(), 0)
            .unwrap();
        assert!(rep.converged);
        assert!(rep.distance < 1e-10);
    }

    #[test]
    fn exp_w_is_branch_independent() {
        let p = SuperParams::new(
            RootSystem::named("B2").unwrap(),
            vec![1, 1],
            vec![Coweight::new(vec![1, 0]), Coweight::new(vec![0, 1])],
            vec![c(-0.4, 0.9), c(1.3, -0.2)],
            vec![c(0.2, 0.1), c(-0.5, 0.3)],
            None,
            c(1.0, 0.0),
            Variant::PLUS_MINUS,
        )
        .unwrap();
        let w = vec![vec![c(1.1, 0.3)], vec![c(0.5, -1.2)]];
        let s = vec![vec![c(0.2, 0.1)], vec![c(-0.3, 0.4)]];
        let shifted = vec![vec![c(0.2, 0.1 + 2.0 * PI)], vec![c(-0.3, 0.4 - 4.0 * PI)]];
        let a = p.w_value(&w, &s).unwrap().exp();
        let b = p.w_value(&w, &shifted).unwrap().exp();
        assert!((a - b).norm() < 1e-12 * a.norm());
    }

    #[test]
    fn phi_gradient_matches_finite_differences() {
        let p = mixed("G2", vec![2, 1], vec![1, 2], Variant::PLUS_MINUS);
        let w = vec![vec![c(1.1, 0.3), c(-0.7, 1.4)], vec![c(0.5, -1.2)]];
        let g = p.phi_gradient(&w).unwrap();
        let h = 1e-5;
        for (i, r) in p.labels() {
            let mut wp = w.clone();
            let mut wm = w.clone();
            wp[i][r] += h;
            wm[i][r] -= h;
            let fd = (p.phi_value(&wp).unwrap() - p.phi_value(&wm).unwrap()) / (2.0 * h);
            assert!((fd - g.w[i][r]).norm() < 1e-7, "{i},{r}");
        }
    }

    #[test]
    fn coincident_points_are_rejected() {
        let p = mixed("A2", vec![1, 1], vec![1, 0], Variant::PLUS_MINUS);
        let err = p.phi_gradient(&[vec![c(1.0, 0.0)], vec![c(1.0, 0.0)]]).unwrap_err();
        assert_eq!(err.name(), "CoincidentPoints");
        let err = p.phi_gradient(&[vec![c(-0.4, 0.9)], vec![c(1.0, 0.0)]]).unwrap_err();
        assert_eq!(err.name(), "CoincidentPoints");
    }
}
