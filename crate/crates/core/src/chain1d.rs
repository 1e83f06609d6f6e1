//! Finite chain of 1D scatterers described by reflection and transmission
//! amplitudes, truncated at second-order multiple reflections.
//!
//! For scatterers A < B < C, the field between A and B is
//!
//! ```text
//! φ_AB(x) ≈ t_A^L (1 + r_B^L r_A^R) e^{ikx} + t_A^L (r_B^L + t_B^L r_C^L t_B^R) e^{-ikx}
//! ```
//!
//! and the effective incident wave to the left of A is
//! `e^{ikx} + (r_A^L + t_A^L r_B^L t_A^R) e^{-ikx}`. The field between A and
//! B is the incident wave with `k → -k` exactly when both
//! [`NegrefResiduals`] vanish.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant in J·s (CODATA 2018, exact).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Electron rest mass in kg as quoted with the chain example.
pub const ELECTRON_MASS: f64 = 9.109_382_91e-31;

/// de Broglie wave number `k = m v / ħ` in reciprocal meters.
pub fn de_broglie_k(mass: f64, velocity: f64) -> Result<f64> {
    if !(mass > 0.0) {
        return Err(Error::Precondition(format!("mass must be positive, got {mass}")));
    }
    Ok(mass * velocity / HBAR)
}

/// Reflection/transmission amplitudes of one scatterer, for incidence from
/// the left (`L`) and from the right (`R`). Unspecified entries are `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ScattererRT {
    pub r_left: Option<Complex64>,
    pub t_left: Option<Complex64>,
    pub r_right: Option<Complex64>,
    pub t_right: Option<Complex64>,
}

/// `|r|² + |t|² - 1` per side; `None` when the pair is not fully specified.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct UnitarityDeficit {
    pub left: Option<f64>,
    pub right: Option<f64>,
}

impl UnitarityDeficit {
    pub fn max_abs(&self) -> f64 {
        [self.left, self.right]
            .into_iter()
            .flatten()
            .map(f64::abs)
            .fold(0.0, f64::max)
    }
}

fn pair_deficit(r: Option<Complex64>, t: Option<Complex64>) -> Option<f64> {
    Some(r?.norm_sqr() + t?.norm_sqr() - 1.0)
}

impl ScattererRT {
    pub fn unitarity_deficit(&self) -> UnitarityDeficit {
        UnitarityDeficit {
            left: pair_deficit(self.r_left, self.t_left),
            right: pair_deficit(self.r_right, self.t_right),
        }
    }

    /// Errors when a fully specified pair misses unitarity by more than `tol`.
    pub fn check_unitarity(&self, tol: f64) -> Result<()> {
        let d = self.unitarity_deficit();
        if d.max_abs() > tol {
            return Err(Error::Domain(format!(
                "unitarity deficit {:.3e} exceeds {tol:.1e}",
                d.max_abs()
            )));
        }
        Ok(())
    }
}

pub fn unitarity_deficit(s: &ScattererRT) -> UnitarityDeficit {
    s.unitarity_deficit()
}

/// Ordered scatterers with strictly increasing positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub scatterers: Vec<ScattererRT>,
    pub positions: Vec<f64>,
    pub k: f64,
}

impl ChainSpec {
    pub fn new(scatterers: Vec<ScattererRT>, positions: Vec<f64>, k: f64) -> Result<Self> {
        if scatterers.len() != positions.len() {
            return Err(Error::Precondition(format!(
                "{} scatterers but {} positions",
                scatterers.len(),
                positions.len()
            )));
        }
        if scatterers.len() < 2 {
            return Err(Error::Precondition("a chain needs at least two scatterers".into()));
        }
        if positions.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Precondition("positions must be strictly increasing".into()));
        }
        if !k.is_finite() {
            return Err(Error::Precondition("wave number must be finite".into()));
        }
        Ok(ChainSpec { scatterers, positions, k })
    }

    /// The three-scatterer chain of the electron example, unit spacing.
    pub fn electron_example() -> Self {
        let s3 = 3f64.sqrt() / 2.0;
        let c = |v: f64| Some(Complex64::new(v, 0.0));
        let a = ScattererRT {
            r_left: c(0.5),
            t_left: c(s3),
            r_right: c(-(0.25f64).sqrt()),
            t_right: c((0.75f64).sqrt()),
        };
        let b = ScattererRT {
            r_left: c(0.31),
            t_left: c(0.95),
            r_right: None,
            t_right: c(1.0),
        };
        let cc = ScattererRT {
            r_left: c(0.89),
            ..Default::default()
        };
        ChainSpec {
            scatterers: vec![a, b, cc],
            positions: vec![0.0, 1.0, 2.0],
            k: 8.7,
        }
    }

    pub fn with_k(&self, k: f64) -> Self {
        ChainSpec { k, ..self.clone() }
    }

    pub fn get(&self, slot: Slot) -> Result<Complex64> {
        let (idx, side) = slot.location();
        let s = self
            .scatterers
            .get(idx)
            .ok_or(Error::MissingCoefficient(slot.name()))?;
        side.read(s).ok_or(Error::MissingCoefficient(slot.name()))
    }

    fn get_or_zero(&self, slot: Slot) -> Result<Complex64> {
        // A missing third scatterer contributes no reflection.
        if slot == Slot::RLC && self.scatterers.len() < 3 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        self.get(slot)
    }

    pub fn set(&mut self, slot: Slot, value: Complex64) {
        let (idx, side) = slot.location();
        while self.scatterers.len() <= idx {
            self.scatterers.push(ScattererRT::default());
            let next = self.positions.last().map_or(0.0, |p| p + 1.0);
            self.positions.push(next);
        }
        side.write(&mut self.scatterers[idx], value);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    RLeft,
    TLeft,
    RRight,
    TRight,
}

impl Side {
    fn read(self, s: &ScattererRT) -> Option<Complex64> {
        match self {
            Side::RLeft => s.r_left,
            Side::TLeft => s.t_left,
            Side::RRight => s.r_right,
            Side::TRight => s.t_right,
        }
    }

    fn write(self, s: &mut ScattererRT, v: Complex64) {
        let field = match self {
            Side::RLeft => &mut s.r_left,
            Side::TLeft => &mut s.t_left,
            Side::RRight => &mut s.r_right,
            Side::TRight => &mut s.t_right,
        };
        *field = Some(v);
    }
}

/// The eight coefficients entering the second-order chain model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Slot {
    RLA,
    TLA,
    RRA,
    TRA,
    RLB,
    TLB,
    TRB,
    RLC,
}

impl Slot {
    pub const ALL: [Slot; 8] = [
        Slot::RLA,
        Slot::TLA,
        Slot::RRA,
        Slot::TRA,
        Slot::RLB,
        Slot::TLB,
        Slot::TRB,
        Slot::RLC,
    ];

    fn location(self) -> (usize, Side) {
        match self {
            Slot::RLA => (0, Side::RLeft),
            Slot::TLA => (0, Side::TLeft),
            Slot::RRA => (0, Side::RRight),
            Slot::TRA => (0, Side::TRight),
            Slot::RLB => (1, Side::RLeft),
            Slot::TLB => (1, Side::TLeft),
            Slot::TRB => (1, Side::TRight),
            Slot::RLC => (2, Side::RLeft),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Slot::RLA => "rLA",
            Slot::TLA => "tLA",
            Slot::RRA => "rRA",
            Slot::TRA => "tRA",
            Slot::RLB => "rLB",
            Slot::TLB => "tLB",
            Slot::TRB => "tRB",
            Slot::RLC => "rLC",
        }
    }

    pub fn parse(name: &str) -> Option<Slot> {
        Slot::ALL.into_iter().find(|s| s.name().eq_ignore_ascii_case(name.trim()))
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Amplitudes of `e^{ikx}` (`forward`) and `e^{-ikx}` (`backward`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveCoefficients {
    pub forward: Complex64,
    pub backward: Complex64,
}

impl WaveCoefficients {
    pub fn at(&self, k: f64, x: f64) -> Complex64 {
        let e = Complex64::new(0.0, k * x).exp();
        self.forward * e + self.backward / e
    }

    /// Coefficients of the same function written for `k → -k`.
    pub fn reversed(&self) -> Self {
        WaveCoefficients {
            forward: self.backward,
            backward: self.forward,
        }
    }
}

/// Second-order coefficients of the field between A and B.
pub fn phi_between_coefficients(chain: &ChainSpec) -> Result<WaveCoefficients> {
    let t_la = chain.get(Slot::TLA)?;
    let r_ra = chain.get(Slot::RRA)?;
    let r_lb = chain.get(Slot::RLB)?;
    let r_lc = chain.get_or_zero(Slot::RLC)?;
    let backward = if r_lc == Complex64::new(0.0, 0.0) {
        t_la * r_lb
    } else {
        t_la * r_lb + t_la * chain.get(Slot::TLB)? * r_lc * chain.get(Slot::TRB)?
    };
    Ok(WaveCoefficients {
        forward: t_la * (1.0 + r_lb * r_ra),
        backward,
    })
}

/// Field between A and B at `a < x < b`, with its coefficient pair.
pub fn phi_between(chain: &ChainSpec, x: f64) -> Result<(Complex64, WaveCoefficients)> {
    let (a, b) = (chain.positions[0], chain.positions[1]);
    if !(x > a && x < b) {
        return Err(Error::Domain(format!("x = {x} is not between A = {a} and B = {b}")));
    }
    let coeffs = phi_between_coefficients(chain)?;
    Ok((coeffs.at(chain.k, x), coeffs))
}

/// `e^{ikx} + (r_A^L + t_A^L r_B^L t_A^R) e^{-ikx}`.
pub fn effective_incident_coefficients(chain: &ChainSpec) -> Result<WaveCoefficients> {
    let reflected = chain.get(Slot::RLA)? + chain.get(Slot::TLA)? * chain.get(Slot::RLB)? * chain.get(Slot::TRA)?;
    Ok(WaveCoefficients {
        forward: Complex64::new(1.0, 0.0),
        backward: reflected,
    })
}

/// Effective incident wave at `x < a`.
pub fn effective_incident(chain: &ChainSpec, x: f64) -> Result<(Complex64, WaveCoefficients)> {
    let a = chain.positions[0];
    if !(x < a) {
        return Err(Error::Domain(format!("x = {x} is not left of A = {a}")));
    }
    let coeffs = effective_incident_coefficients(chain)?;
    Ok((coeffs.at(chain.k, x), coeffs))
}

/// Moduli of the two negative-refraction conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NegrefResiduals {
    /// `|(r_A^L + t_A^L r_B^L t_A^R) - t_A^L (1 + r_A^R r_B^L)|`
    pub first: f64,
    /// `|1 - t_A^L (r_B^L + t_B^R t_B^L r_C^L)|`
    pub second: f64,
}

impl NegrefResiduals {
    pub fn max(&self) -> f64 {
        self.first.max(self.second)
    }
}

fn condition_values(chain: &ChainSpec) -> Result<(Complex64, Complex64)> {
    let t_la = chain.get(Slot::TLA)?;
    let r_lb = chain.get(Slot::RLB)?;
    let first = chain.get(Slot::RLA)? + t_la * r_lb * chain.get(Slot::TRA)? - t_la * (1.0 + chain.get(Slot::RRA)? * r_lb);
    let second = 1.0 - t_la * (r_lb + chain.get(Slot::TRB)? * chain.get(Slot::TLB)? * chain.get(Slot::RLC)?);
    Ok((first, second))
}

pub fn negref_conditions(chain: &ChainSpec) -> Result<NegrefResiduals> {
    if chain.scatterers.len() < 3 {
        return Err(Error::Precondition("the conditions need scatterers A, B and C".into()));
    }
    let (first, second) = condition_values(chain)?;
    Ok(NegrefResiduals {
        first: first.norm(),
        second: second.norm(),
    })
}

/// Holomorphic derivatives of the two condition values with respect to each slot.
fn condition_gradients(chain: &ChainSpec) -> Result<[[Complex64; 8]; 2]> {
    let g = |s| chain.get(s);
    let (t_la, r_ra, t_ra) = (g(Slot::TLA)?, g(Slot::RRA)?, g(Slot::TRA)?);
    let (r_lb, t_lb, t_rb, r_lc) = (g(Slot::RLB)?, g(Slot::TLB)?, g(Slot::TRB)?, g(Slot::RLC)?);
    let one = Complex64::new(1.0, 0.0);
    let mut d = [[Complex64::new(0.0, 0.0); 8]; 2];

    d[0][Slot::RLA.index()] = one;
    d[0][Slot::TLA.index()] = r_lb * t_ra - one - r_ra * r_lb;
    d[0][Slot::RRA.index()] = -t_la * r_lb;
    d[0][Slot::TRA.index()] = t_la * r_lb;
    d[0][Slot::RLB.index()] = t_la * t_ra - t_la * r_ra;

    d[1][Slot::TLA.index()] = -(r_lb + t_rb * t_lb * r_lc);
    d[1][Slot::RLB.index()] = -t_la;
    d[1][Slot::TLB.index()] = -t_la * t_rb * r_lc;
    d[1][Slot::TRB.index()] = -t_la * t_lb * r_lc;
    d[1][Slot::RLC.index()] = -t_la * t_rb * t_lb;
    Ok(d)
}

/// A free complex coefficient with box bounds on its real and imaginary parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeParameter {
    pub slot: Slot,
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl FreeParameter {
    /// Free within the unit box `[-1, 1] × [-1, 1]`.
    pub fn unit(slot: Slot) -> Self {
        FreeParameter {
            slot,
            re: (-1.0, 1.0),
            im: (-1.0, 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignOptions {
    pub tol: f64,
    pub starts: usize,
    pub seed: u64,
    pub max_iterations: usize,
    /// Weight of the quadratic unitarity penalty.
    pub penalty_weight: f64,
    /// Require every fully specified pair to be unitary within `tol`.
    pub strict: bool,
}

impl Default for DesignOptions {
    fn default() -> Self {
        DesignOptions {
            tol: 1e-10,
            starts: 64,
            seed: 0,
            max_iterations: 200,
            penalty_weight: 1.0,
            strict: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DesignStatus {
    Solved,
    NoSolution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    pub status: DesignStatus,
    pub seed: u64,
    pub starts: usize,
    pub best_start: usize,
    pub residuals: NegrefResiduals,
    /// Largest deficit over fully specified pairs.
    pub max_unitarity_deficit: f64,
    pub chain: ChainSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pair {
    scatterer: usize,
    left: bool,
}

impl Pair {
    fn slots(self) -> (Side, Side) {
        if self.left {
            (Side::RLeft, Side::TLeft)
        } else {
            (Side::RRight, Side::TRight)
        }
    }
}

struct Problem<'a> {
    free: &'a [FreeParameter],
    /// Pairs with both entries specified and at least one free.
    penalized: Vec<Pair>,
    weight: f64,
}

impl Problem<'_> {
    fn apply(&self, base: &ChainSpec, params: &[f64]) -> ChainSpec {
        let mut chain = base.clone();
        for (p, v) in self.free.iter().zip(params.chunks(2)) {
            chain.set(p.slot, Complex64::new(v[0], v[1]));
        }
        chain
    }

    fn residual_vector(&self, chain: &ChainSpec) -> Result<DVector<f64>> {
        let (e1, e2) = condition_values(chain)?;
        let sw = self.weight.sqrt();
        let mut v = vec![e1.re, e1.im, e2.re, e2.im];
        for pair in &self.penalized {
            let s = &chain.scatterers[pair.scatterer];
            let (rs, ts) = pair.slots();
            let d = pair_deficit(rs.read(s), ts.read(s)).unwrap_or(0.0);
            v.push(sw * d);
        }
        Ok(DVector::from_vec(v))
    }

    fn jacobian(&self, chain: &ChainSpec) -> Result<DMatrix<f64>> {
        let grads = condition_gradients(chain)?;
        let m = 4 + self.penalized.len();
        let n = 2 * self.free.len();
        let sw = self.weight.sqrt();
        let mut j = DMatrix::zeros(m, n);
        for (col, p) in self.free.iter().enumerate() {
            for (row, g) in grads.iter().enumerate() {
                let d = g[p.slot.index()];
                // ∂/∂Re p = d, ∂/∂Im p = i·d
                j[(2 * row, 2 * col)] = d.re;
                j[(2 * row + 1, 2 * col)] = d.im;
                j[(2 * row, 2 * col + 1)] = -d.im;
                j[(2 * row + 1, 2 * col + 1)] = d.re;
            }
            let (idx, side) = p.slot.location();
            for (k, pair) in self.penalized.iter().enumerate() {
                let (rs, ts) = pair.slots();
                if pair.scatterer == idx && (side == rs || side == ts) {
                    let v = chain.get(p.slot)?;
                    j[(4 + k, 2 * col)] = sw * 2.0 * v.re;
                    j[(4 + k, 2 * col + 1)] = sw * 2.0 * v.im;
                }
            }
        }
        Ok(j)
    }

    fn clamp(&self, params: &mut [f64]) {
        for (p, v) in self.free.iter().zip(params.chunks_mut(2)) {
            v[0] = v[0].clamp(p.re.0, p.re.1);
            v[1] = v[1].clamp(p.im.0, p.im.1);
        }
    }
}

fn max_specified_deficit(chain: &ChainSpec) -> f64 {
    chain
        .scatterers
        .iter()
        .map(|s| s.unitarity_deficit().max_abs())
        .fold(0.0, f64::max)
}

fn score(chain: &ChainSpec, strict: bool) -> Result<(NegrefResiduals, f64, f64)> {
    let res = negref_conditions(chain)?;
    let deficit = max_specified_deficit(chain);
    let metric = if strict { res.max().max(deficit) } else { res.max() };
    Ok((res, deficit, metric))
}

/// Levenberg–Marquardt from one start; returns the final parameter vector.
fn descend(problem: &Problem, base: &ChainSpec, mut params: Vec<f64>, opts: &DesignOptions) -> Result<Vec<f64>> {
    let n = params.len();
    if n == 0 {
        return Ok(params);
    }
    let mut lambda = 1e-3;
    let mut chain = problem.apply(base, &params);
    let mut f = problem.residual_vector(&chain)?;
    let mut cost = f.norm_squared();
    for _ in 0..opts.max_iterations {
        if f.amax() <= opts.tol * 1e-3 {
            break;
        }
        let j = problem.jacobian(&chain)?;
        let jt = j.transpose();
        let grad = &jt * &f;
        let normal = &jt * &j;
        let mut accepted = false;
        while lambda < 1e12 {
            let mut a = normal.clone();
            for i in 0..n {
                a[(i, i)] += lambda * (1.0 + normal[(i, i)]);
            }
            let step = match a.lu().solve(&(-&grad)) {
                Some(s) => s,
                None => {
                    lambda *= 10.0;
                    continue;
                }
            };
            let mut trial: Vec<f64> = params.iter().zip(step.iter()).map(|(p, s)| p + s).collect();
            problem.clamp(&mut trial);
            let trial_chain = problem.apply(base, &trial);
            let trial_f = problem.residual_vector(&trial_chain)?;
            let trial_cost = trial_f.norm_squared();
            if trial_cost < cost {
                params = trial;
                chain = trial_chain;
                f = trial_f;
                cost = trial_cost;
                lambda = (lambda / 3.0).max(1e-15);
                accepted = true;
                break;
            }
            lambda *= 4.0;
        }
        if !accepted {
            break;
        }
    }
    Ok(params)
}

fn random_start(free: &[FreeParameter], rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut v = Vec::with_capacity(2 * free.len());
    for p in free {
        let radius = rng.gen::<f64>().sqrt();
        let angle = rng.gen::<f64>() * std::f64::consts::TAU;
        v.push((radius * angle.cos()).clamp(p.re.0, p.re.1));
        v.push((radius * angle.sin()).clamp(p.im.0, p.im.1));
    }
    v
}

/// Searches the free coefficients for a chain satisfying both conditions.
///
/// Each start draws its free parameters uniformly from the complex unit
/// disk (clipped to the bounds) using a generator seeded by
/// `seed + start index`, then runs damped least squares on the two complex
/// conditions plus a quadratic penalty on the unitarity deficit of every
/// fully specified pair that touches a free slot. The start with the lowest
/// final residual wins, ties going to the lower index.
pub fn design_search(base: &ChainSpec, free: &[FreeParameter], opts: &DesignOptions) -> Result<DesignReport> {
    for (i, p) in free.iter().enumerate() {
        let ok = |(lo, hi): (f64, f64)| lo.is_finite() && hi.is_finite() && lo <= hi;
        if !ok(p.re) || !ok(p.im) {
            return Err(Error::InfeasibleBounds(format!(
                "{}: re {:?}, im {:?}",
                p.slot.name(),
                p.re,
                p.im
            )));
        }
        if free[..i].iter().any(|q| q.slot == p.slot) {
            return Err(Error::InfeasibleBounds(format!("{} listed twice", p.slot.name())));
        }
    }
    if opts.starts == 0 && !free.is_empty() {
        return Err(Error::Precondition("design search needs at least one start".into()));
    }

    // Free slots may be unspecified in the base chain; give them a placeholder.
    let mut seeded = base.clone();
    for p in free {
        seeded.set(p.slot, Complex64::new(0.0, 0.0));
    }
    let mut penalized = Vec::new();
    for (idx, s) in seeded.scatterers.iter().enumerate() {
        for left in [true, false] {
            let pair = Pair { scatterer: idx, left };
            let (rs, ts) = pair.slots();
            let touches = free.iter().any(|p| {
                let (i, side) = p.slot.location();
                i == idx && (side == rs || side == ts)
            });
            if touches && rs.read(s).is_some() && ts.read(s).is_some() {
                penalized.push(pair);
            }
        }
    }
    let problem = Problem {
        free,
        penalized,
        weight: opts.penalty_weight,
    };

    let starts = if free.is_empty() { 1 } else { opts.starts };
    let outcomes = (0..starts)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(i as u64));
            let start = random_start(free, &mut rng);
            let params = descend(&problem, &seeded, start, opts)?;
            let chain = problem.apply(&seeded, &params);
            let (residuals, deficit, metric) = score(&chain, opts.strict)?;
            Ok((i, chain, residuals, deficit, metric))
        })
        .collect::<Result<Vec<_>>>()?;

    let (best_start, chain, residuals, deficit, metric) = outcomes
        .into_iter()
        .min_by(|a, b| a.4.total_cmp(&b.4).then(a.0.cmp(&b.0)))
        .expect("at least one start");
    let status = if metric <= opts.tol {
        DesignStatus::Solved
    } else {
        DesignStatus::NoSolution
    };
    Ok(DesignReport {
        status,
        seed: opts.seed,
        starts,
        best_start,
        residuals,
        max_unitarity_deficit: deficit,
        chain,
    })
}
