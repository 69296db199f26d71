//! Pointwise evaluation of the configuration-space integrand on `(R^3)^4` and
//! Monte Carlo estimators for the invariant of `S^3`.
//!
//! Each propagator is `G*(f σ)` with `σ` the area form of `S^2` normalised to
//! total mass 1 and `G` the Gauss map of an edge. At a point, the 2-form of
//! edge `e` is `α_e ∧ β_e` with `α_e, β_e` the rows `e_1ᵀ dG_e, e_2ᵀ dG_e` for a
//! positive tangent frame `(e_1, e_2)` at `u_e`, times `f(u_e)/(4π)`. The top
//! form on `(R^3)^4` is then the determinant of the twelve stacked rows.
//!
//! Every factor depends only on point differences, so the twelve rows span
//! at most nine dimensions and the top form vanishes identically; computed
//! values are rounding noise on the scale of the Hadamard bound, and
//! comparisons of full integrands are made relative to that bound.
//! [`Kernel::PairProbe`] evaluates each edge's 2-form on its own pair of
//! vectors instead, a non-degenerate quantity with the same symmetries
//! (label independence, sign change under edge reversal), used to check the
//! combination logic with value-relative tolerances.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Cauchy, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{gauss, Configuration, Mat3, UnitVec3, Vec3};
use crate::graphs::{canonical_graph, EdgeOrientedGraph, GraphName, Labeling, NE, NV};
use crate::{Error, Result};

const DIM: usize = 3 * NV;
pub const FOUR_PI: f64 = 4.0 * PI;

/// Density of a propagator with respect to the normalised area form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PropagatorForm {
    Uniform,
    /// `exp(κ⟨p, center⟩)` normalised to mass 1.
    Bump { center: UnitVec3, concentration: f64 },
    /// `½(f(p) + f(−p))`: the form `½(ω − ι*ω)` for the swap `ι` of the two points.
    Antisymmetrized { inner: Box<PropagatorForm> },
}

impl PropagatorForm {
    pub fn bump(center: UnitVec3, concentration: f64) -> Result<Self> {
        if !(concentration > 0.0) || !concentration.is_finite() {
            return Err(Error::Domain("bump concentration must be positive and finite".into()));
        }
        Ok(Self::Bump { center, concentration })
    }

    pub fn antisymmetrized(self) -> Self {
        Self::Antisymmetrized { inner: Box::new(self) }
    }

    pub fn rotated(&self, r: &Mat3) -> Result<Self> {
        Ok(match self {
            Self::Uniform => Self::Uniform,
            Self::Bump { center, concentration } => {
                Self::Bump { center: UnitVec3::normalize(r.apply(center.vec()))?, concentration: *concentration }
            }
            Self::Antisymmetrized { inner } => inner.rotated(r)?.antisymmetrized(),
        })
    }

    fn validate(&self) -> Result<()> {
        match self {
            Self::Uniform => Ok(()),
            Self::Bump { concentration, .. } => Self::bump(UnitVec3::normalize(Vec3::new(0.0, 0.0, 1.0))?, *concentration).map(|_| ()),
            Self::Antisymmetrized { inner } => inner.validate(),
        }
    }

    fn eval(&self, p: Vec3) -> f64 {
        match self {
            Self::Uniform => 1.0,
            Self::Bump { center, concentration: k } => {
                // κ e^{κ(t−1)} · 2/(1 − e^{−2κ}) = e^{κt} κ / sinh κ, without overflow.
                let t = p.dot(&center.vec()).clamp(-1.0, 1.0);
                if *k < 1e-8 {
                    return 1.0 + k * t;
                }
                k * (k * (t - 1.0)).exp() * 2.0 / -(-2.0 * k).exp_m1()
            }
            Self::Antisymmetrized { inner } => 0.5 * (inner.eval(p) + inner.eval(-p)),
        }
    }
}

/// Density of `form` at `p`.
pub fn density(form: &PropagatorForm, p: Vec3) -> Result<f64> {
    if !p.is_finite() || (p.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!("density needs a unit vector, got {:?}", p.0)));
    }
    form.validate()?;
    Ok(form.eval(p))
}

/// Forms indexed by label: `forms[i]` is attached to label `i + 1`.
pub type Forms = [PropagatorForm; NE];

pub fn uniform_forms() -> Forms {
    std::array::from_fn(|_| PropagatorForm::Uniform)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SignConvention {
    /// Every oriented graph integrated with the fixed orientation of `(R^3)^4`.
    #[serde(rename = "fixed_M4")]
    FixedM4,
    /// Orientation induced by the (edge-orientation, vertex-orientation) pair:
    /// sign `(−1)^{|R|}` for the graph obtained by reversing the edges in `R`.
    #[serde(rename = "pair_induced")]
    PairInduced,
}

/// The geometric part attached to an edge at a configuration.
#[derive(Clone, Copy, Debug)]
pub struct EdgeFrame {
    pub u: Vec3,
    /// `e_1ᵀ dG` and `e_2ᵀ dG` as covectors on `(R^3)^4`.
    pub rows: [[f64; DIM]; 2],
}

/// Frames for every edge. `angles[e]` rotates the tangent frame of edge `e`
/// inside its tangent plane; values must not depend on it.
pub fn frames(g: &EdgeOrientedGraph, c: &Configuration, angles: Option<&[f64; NE]>) -> Result<[EdgeFrame; NE]> {
    guard(c)?;
    let mut out = [EdgeFrame { u: Vec3::ZERO, rows: [[0.0; DIM]; 2] }; NE];
    for (e, frame) in out.iter_mut().enumerate() {
        let (t, h) = (g.tail(e), g.head(e));
        let (x, y) = (c.points[t], c.points[h]);
        let u = gauss(x, y)?;
        let r = (y - x).norm();
        let (mut e1, mut e2) = u.tangent_frame();
        if let Some(a) = angles {
            let (s, co) = a[e].sin_cos();
            (e1, e2) = (e1 * co + e2 * s, e2 * co - e1 * s);
        }
        for (k, v) in [e1, e2].iter().enumerate() {
            for i in 0..3 {
                frame.rows[k][3 * h + i] += v.0[i] / r;
                frame.rows[k][3 * t + i] -= v.0[i] / r;
            }
        }
        frame.u = u.vec();
    }
    Ok(out)
}

/// Relative distance below which a configuration is treated as diagonal.
pub const DIAGONAL_GUARD: f64 = 1e-12;

fn guard(c: &Configuration) -> Result<()> {
    let scale = c.max_distance().max(1.0);
    if !(c.min_distance() >= DIAGONAL_GUARD * scale) {
        return Err(Error::Domain("configuration too close to the diagonal".into()));
    }
    Ok(())
}

/// Determinant by LU with partial pivoting; `m` is row-major `n × n`.
pub fn determinant(m: &mut [f64], n: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..n {
        let p = (col..n).max_by(|&a, &b| m[a * n + col].abs().total_cmp(&m[b * n + col].abs())).expect("nonempty");
        if m[p * n + col] == 0.0 {
            return 0.0;
        }
        if p != col {
            for k in 0..n {
                m.swap(p * n + k, col * n + k);
            }
            det = -det;
        }
        let piv = m[col * n + col];
        det *= piv;
        for r in col + 1..n {
            let f = m[r * n + col] / piv;
            if f != 0.0 {
                for k in col..n {
                    m[r * n + k] -= f * m[col * n + k];
                }
            }
        }
    }
    det
}

fn dot(a: &[f64; DIM], b: &[f64; DIM]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64; DIM]) -> f64 {
    dot(a, a).sqrt()
}

/// The wedge of the 2-forms of `edges`, without densities, on `2k` vectors,
/// together with its Hadamard bound.
pub fn wedge_value(frames: &[EdgeFrame; NE], edges: &[usize], vectors: &[[f64; DIM]]) -> Result<(f64, f64)> {
    let n = 2 * edges.len();
    if vectors.len() != n {
        return Err(Error::Invalid(format!("{} edges need {n} vectors, got {}", edges.len(), vectors.len())));
    }
    let mut m = vec![0.0; n * n];
    let mut scale = 1.0;
    for (i, &e) in edges.iter().enumerate() {
        for k in 0..2 {
            let row = &frames[e].rows[k];
            let r = 2 * i + k;
            for (col, v) in vectors.iter().enumerate() {
                m[r * n + col] = dot(row, v);
            }
            scale *= norm(row);
        }
    }
    scale *= vectors.iter().map(norm).product::<f64>();
    Ok((determinant(&mut m, n), scale))
}

fn standard_basis() -> Vec<[f64; DIM]> {
    (0..DIM).map(|i| std::array::from_fn(|k| if k == i { 1.0 } else { 0.0 })).collect()
}

/// Value of a top-degree or probe integrand together with a magnitude
/// against which rounding errors should be measured.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Scaled {
    pub value: f64,
    pub scale: f64,
}

fn densities(forms: &Forms, frames: &[EdgeFrame; NE]) -> [[f64; NE]; NE] {
    std::array::from_fn(|e| std::array::from_fn(|i| forms[i].eval(frames[e].u)))
}

/// The integrand of `I(Γ, j)` on the standard basis of `(R^3)^4`.
pub fn integrand(g: &EdgeOrientedGraph, j: &Labeling, forms: &Forms, c: &Configuration) -> Result<f64> {
    integrand_scaled(g, j, forms, c, None).map(|s| s.value)
}

pub fn integrand_scaled(
    g: &EdgeOrientedGraph,
    j: &Labeling,
    forms: &Forms,
    c: &Configuration,
    angles: Option<&[f64; NE]>,
) -> Result<Scaled> {
    for f in forms {
        f.validate()?;
    }
    let fr = frames(g, c, angles)?;
    let all: Vec<usize> = (0..NE).collect();
    let (d, s) = wedge_value(&fr, &all, &standard_basis())?;
    let dens: f64 = (0..NE).map(|e| forms[j.label(e) as usize - 1].eval(fr[e].u) / FOUR_PI).product();
    Ok(Scaled { value: d * dens, scale: s * dens })
}

/// The wedge over a subset of edges, densities included, on given vectors.
pub fn partial_integrand(
    g: &EdgeOrientedGraph,
    j: &Labeling,
    forms: &Forms,
    c: &Configuration,
    edges: &[usize],
    vectors: &[[f64; DIM]],
) -> Result<Scaled> {
    let fr = frames(g, c, None)?;
    let (d, s) = wedge_value(&fr, edges, vectors)?;
    let dens: f64 = edges.iter().map(|&e| forms[j.label(e) as usize - 1].eval(fr[e].u) / FOUR_PI).product();
    Ok(Scaled { value: d * dens, scale: s * dens })
}

/// Outcome of comparing both sides of the antisymmetrisation expansion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExpansionCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub scale: f64,
    /// `|lhs − rhs| / max(|lhs|, |rhs|, scale)`.
    pub discrepancy: f64,
}

/// Compares `W(Γ, antisymmetrized forms)` with
/// `2^{−k} Σ_{R ⊆ edges} (−1)^{|R|} W(reverse(Γ, R), forms)` where `W` is the
/// wedge over `edges` on `vectors` (the full integrand when `edges` is every
/// edge and `vectors` is `None`). Reversal keeps edge ids, so labels follow.
pub fn antisym_expansion_check_on(
    g: &EdgeOrientedGraph,
    j: &Labeling,
    forms: &Forms,
    c: &Configuration,
    edges: &[usize],
    vectors: Option<&[[f64; DIM]]>,
    value_relative: bool,
) -> Result<ExpansionCheck> {
    let basis;
    let vectors = match vectors {
        Some(v) => v,
        None => {
            basis = standard_basis();
            &basis[..]
        }
    };
    let anti: Forms = forms.clone().map(PropagatorForm::antisymmetrized);
    let lhs = partial_integrand(g, j, &anti, c, edges, vectors)?;
    let mut rhs = 0.0;
    let mut scale = lhs.scale;
    for r in 0u32..1 << edges.len() {
        let rev: Vec<usize> = edges.iter().enumerate().filter(|(i, _)| r >> i & 1 == 1).map(|(_, &e)| e).collect();
        let term = partial_integrand(&g.reverse_edges(&rev), j, forms, c, edges, vectors)?;
        let sign = if rev.len() % 2 == 0 { 1.0 } else { -1.0 };
        rhs += sign * term.value;
        scale = scale.max(term.scale);
    }
    rhs /= (1u64 << edges.len()) as f64;
    let floor = if value_relative { 0.0 } else { scale };
    let denom = lhs.value.abs().max(rhs.abs()).max(floor);
    let discrepancy = if denom == 0.0 { 0.0 } else { (lhs.value - rhs).abs() / denom };
    Ok(ExpansionCheck { lhs: lhs.value, rhs, scale, discrepancy })
}

/// The full-integrand identity, measured against the Hadamard scale.
pub fn antisym_expansion_check(g: &EdgeOrientedGraph, j: &Labeling, forms: &Forms, c: &Configuration) -> Result<f64> {
    let all: Vec<usize> = (0..NE).collect();
    antisym_expansion_check_on(g, j, forms, c, &all, None, false).map(|r| r.discrepancy)
}

/// What multiplies the densities in a sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Kernel {
    /// The top-degree form on the standard basis (the actual integrand).
    TopForm,
    /// `Π_e ω_e(X_e, Y_e)` for fixed per-edge probe vectors.
    PairProbe { vectors: Vec<[[f64; DIM]; 2]> },
}

impl Kernel {
    pub fn pair_probe(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vectors = (0..NE)
            .map(|_| std::array::from_fn(|_| std::array::from_fn(|_| rng.random_range(-1.0..1.0))))
            .collect();
        Kernel::PairProbe { vectors }
    }

    fn geometric(&self, fr: &[EdgeFrame; NE]) -> Result<(f64, f64)> {
        match self {
            Kernel::TopForm => {
                let all: Vec<usize> = (0..NE).collect();
                wedge_value(fr, &all, &standard_basis())
            }
            Kernel::PairProbe { vectors } => {
                if vectors.len() != NE {
                    return Err(Error::Invalid("pair probe needs one vector pair per edge".into()));
                }
                let mut v = 1.0;
                let mut s = 1.0;
                for e in 0..NE {
                    let (x, y) = wedge_value(fr, &[e], &vectors[e])?;
                    v *= x;
                    s *= y;
                }
                Ok((v, s))
            }
        }
    }
}

/// Permanent of a 6×6 matrix (Ryser).
pub fn permanent6(a: &[[f64; NE]; NE]) -> f64 {
    let mut total = 0.0;
    for s in 1u32..1 << NE {
        let mut prod = 1.0;
        for row in a {
            prod *= (0..NE).filter(|k| s >> k & 1 == 1).map(|k| row[k]).sum::<f64>();
        }
        let sign = if (NE as u32 - s.count_ones()) % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * prod;
    }
    total
}

/// `Σ_j Π_e f_{j(e)}(u_e)` over all 720 labelings.
fn label_sum(forms: &Forms, fr: &[EdgeFrame; NE], symmetric: bool) -> f64 {
    if symmetric {
        720.0 * fr.iter().map(|f| forms[0].eval(f.u)).product::<f64>()
    } else {
        permanent6(&densities(forms, fr))
    }
}

fn forms_identical(forms: &Forms) -> bool {
    forms.iter().all(|f| f == &forms[0])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "formula", content = "convention", rename_all = "snake_case")]
pub enum Formula {
    Lambda2,
    Lescop(SignConvention),
}

const INV_4PI6: f64 = 1.0 / (FOUR_PI * FOUR_PI * FOUR_PI * FOUR_PI * FOUR_PI * FOUR_PI);

/// The summand of the chosen formula at one configuration (before dividing
/// by the proposal density).
pub fn formula_value(formula: Formula, forms: &Forms, kernel: &Kernel, c: &Configuration) -> Result<Scaled> {
    let symmetric = forms_identical(forms);
    let mut value = 0.0;
    let mut scale = 0.0;
    let mut add = |g: &EdgeOrientedGraph, coef: f64| -> Result<()> {
        let fr = frames(g, c, None)?;
        let (d, s) = kernel.geometric(&fr)?;
        let l = label_sum(forms, &fr, symmetric);
        value += coef * d * l * INV_4PI6;
        scale += (coef * s * l * INV_4PI6).abs();
        Ok(())
    };
    match formula {
        Formula::Lambda2 => {
            let base = 1.0 / (16.0 * 720.0);
            for (name, coef) in [
                (GraphName::T1, base / 3.0),
                (GraphName::T2, base / 3.0),
                (GraphName::W1, base),
                (GraphName::W2, base),
            ] {
                add(&canonical_graph(name), coef)?;
            }
        }
        Formula::Lescop(conv) => {
            let base = 1.0 / (64.0 * 720.0);
            for (name, shape_coef) in [(GraphName::T1, 1.0 / 24.0), (GraphName::W1, 1.0 / 8.0)] {
                let g0 = canonical_graph(name);
                for mask in 0u8..64 {
                    let sign = match conv {
                        SignConvention::PairInduced if mask.count_ones() % 2 == 1 => -1.0,
                        _ => 1.0,
                    };
                    add(&g0.reverse_mask(mask), sign * base * shape_coef)?;
                }
            }
        }
    }
    Ok(Scaled { value, scale })
}

/// Result of a Monte Carlo run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MCEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub median_of_means: f64,
    pub n: u64,
    pub rejections: u64,
    pub seed: u64,
    pub shards: u32,
    /// The six forms coincide, so the labeling sum was taken as 720 copies.
    pub label_symmetry: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    pub shards: u32,
    /// Worker threads; `None` uses the global pool. Never changes results.
    pub threads: Option<usize>,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self { samples, seed, shards: 8, threads: None }
    }
}

/// Density of the proposal: independent standard Cauchy coordinates.
pub fn proposal_density(c: &Configuration) -> f64 {
    c.flat().iter().map(|x| 1.0 / (PI * (1.0 + x * x))).product()
}

/// Draws a configuration from the proposal, counting rejected draws.
pub fn sample_configuration<R: Rng + ?Sized>(rng: &mut R, rejections: &mut u64) -> Configuration {
    let cauchy = Cauchy::new(0.0, 1.0).expect("valid Cauchy parameters");
    loop {
        let pts: [Vec3; NV] = std::array::from_fn(|_| Vec3(std::array::from_fn(|_| cauchy.sample(rng))));
        match Configuration::new(pts) {
            Ok(c) if guard(&c).is_ok() => return c,
            _ => *rejections += 1,
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(&self, o: &Welford) -> Welford {
        if self.n == 0 {
            return *o;
        }
        if o.n == 0 {
            return *self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Welford {
            n,
            mean: self.mean + d * o.n as f64 / n as f64,
            m2: self.m2 + o.m2 + d * d * (self.n as f64) * (o.n as f64) / n as f64,
        }
    }
}

/// Shard `i` of `k` uses stream `i` of the generator seeded by `seed`.
pub fn shard_rng(seed: u64, shard: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard as u64);
    rng
}

/// Generic sharded estimator of `E[f(c)/q(c)]`.
pub fn run_mc<F>(cfg: &McConfig, label_symmetry: bool, f: F) -> Result<MCEstimate>
where
    F: Fn(&Configuration) -> Result<f64> + Sync,
{
    if cfg.samples == 0 || cfg.shards == 0 {
        return Err(Error::Usage("samples and shards must be positive".into()));
    }
    let k = cfg.shards as u64;
    let run_shard = |i: u32| -> Result<(Welford, u64)> {
        let n = cfg.samples / k + u64::from((i as u64) < cfg.samples % k);
        let mut rng = shard_rng(cfg.seed, i);
        let mut w = Welford::default();
        let mut rejected = 0;
        let mut done = 0;
        while done < n {
            let c = sample_configuration(&mut rng, &mut rejected);
            match f(&c) {
                Ok(v) => {
                    w.push(v / proposal_density(&c));
                    done += 1;
                }
                Err(Error::Domain(_)) => rejected += 1,
                Err(e) => return Err(e),
            }
        }
        Ok((w, rejected))
    };
    let parts: Vec<Result<(Welford, u64)>> = match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Internal(e.to_string()))?
            .install(|| (0..cfg.shards).into_par_iter().map(run_shard).collect()),
        None => (0..cfg.shards).into_par_iter().map(run_shard).collect(),
    };
    let mut total = Welford::default();
    let mut rejections = 0;
    let mut means = Vec::with_capacity(parts.len());
    for p in parts {
        let (w, r) = p?;
        total = total.merge(&w);
        rejections += r;
        if w.n > 0 {
            means.push(w.mean);
        }
    }
    means.sort_by(f64::total_cmp);
    let median_of_means = match means.len() {
        0 => f64::NAN,
        m if m % 2 == 1 => means[m / 2],
        m => 0.5 * (means[m / 2 - 1] + means[m / 2]),
    };
    let var = if total.n > 1 { total.m2 / (total.n - 1) as f64 } else { 0.0 };
    Ok(MCEstimate {
        mean: total.mean,
        stderr: (var / total.n as f64).sqrt(),
        median_of_means,
        n: total.n,
        rejections,
        seed: cfg.seed,
        shards: cfg.shards,
        label_symmetry,
    })
}

/// Estimate of `I(Γ, j)`.
pub fn estimate_integral(g: &EdgeOrientedGraph, j: &Labeling, forms: &Forms, cfg: &McConfig) -> Result<MCEstimate> {
    for f in forms {
        f.validate()?;
    }
    run_mc(cfg, false, |c| integrand(g, j, forms, c))
}

/// Estimate of `λ₂(S^3)` from the tetrahedral and double-theta sums.
pub fn estimate_lambda2(forms: &Forms, kernel: &Kernel, cfg: &McConfig) -> Result<MCEstimate> {
    estimate_formula(Formula::Lambda2, forms, kernel, cfg)
}

/// Estimate of the sum over all 64 orientations of each shape.
pub fn estimate_lambda2_lescop(
    forms: &Forms,
    kernel: &Kernel,
    cfg: &McConfig,
    convention: SignConvention,
) -> Result<MCEstimate> {
    estimate_formula(Formula::Lescop(convention), forms, kernel, cfg)
}

pub fn estimate_formula(formula: Formula, forms: &Forms, kernel: &Kernel, cfg: &McConfig) -> Result<MCEstimate> {
    for f in forms {
        f.validate()?;
    }
    run_mc(cfg, forms_identical(forms), |c| formula_value(formula, forms, kernel, c).map(|s| s.value))
}

/// Per-sample values of two formulas on the same draws, for comparisons.
pub fn paired_samples(
    a: Formula,
    b: Formula,
    forms: &Forms,
    kernel: &Kernel,
    n: usize,
    seed: u64,
) -> Result<Vec<(Scaled, Scaled)>> {
    let mut rng = shard_rng(seed, 0);
    let mut rejected = 0;
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let c = sample_configuration(&mut rng, &mut rejected);
        out.push((formula_value(a, forms, kernel, &c)?, formula_value(b, forms, kernel, &c)?));
    }
    Ok(out)
}
