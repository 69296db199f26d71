//! Points and directions in R^3, the Gauss map, and the feasibility of
//! intersecting one propagating chain per edge.
//!
//! For `S^3` the chain of a direction `a` consists of the pairs `(x, y)` with
//! `y` on the open half-line from `x` along `a`. A configuration lies on all
//! six chains iff `c(head) − c(tail) = t_e a_e` with `t_e > 0` for every
//! edge; by homogeneity `t_e ≥ 1` is equivalent, which makes this a linear
//! program.

use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graphs::{EdgeOrientedGraph, Labeling, NE, NV};
use crate::linalg::{null_space, rank, Field};
use crate::lp::{phase_one, LpOutcome};
use crate::rational::Q;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec3(pub [f64; 3]);

impl Vec3 {
    pub const ZERO: Vec3 = Vec3([0.0; 3]);

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3([x, y, z])
    }

    pub fn dot(&self, o: &Vec3) -> f64 {
        (0..3).map(|i| self.0[i] * o.0[i]).sum()
    }

    pub fn cross(&self, o: &Vec3) -> Vec3 {
        let (a, b) = (self.0, o.0);
        Vec3([a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]])
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

/// A point of S^2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UnitVec3(Vec3);

pub const UNIT_TOL: f64 = 1e-12;

impl UnitVec3 {
    pub fn new(v: Vec3) -> Result<Self> {
        if !v.is_finite() || (v.norm() - 1.0).abs() > UNIT_TOL {
            return Err(Error::Domain(format!("{:?} is not a unit vector", v.0)));
        }
        Ok(Self(v))
    }

    pub fn normalize(v: Vec3) -> Result<Self> {
        let n = v.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Domain("cannot normalise a zero or non-finite vector".into()));
        }
        Ok(Self(v * (1.0 / n)))
    }

    pub fn vec(&self) -> Vec3 {
        self.0
    }

    pub fn antipode(&self) -> Self {
        Self(-self.0)
    }

    /// An orthonormal pair `(e1, e2)` with `(e1, e2, self)` positively oriented.
    pub fn tangent_frame(&self) -> (Vec3, Vec3) {
        let u = self.0;
        let seed = if u.0[0].abs() < 0.9 { Vec3::new(1.0, 0.0, 0.0) } else { Vec3::new(0.0, 1.0, 0.0) };
        let e1 = seed - u * seed.dot(&u);
        let e1 = e1 * (1.0 / e1.norm());
        let e2 = u.cross(&e1);
        (e1, e2)
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let v = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let n = v.norm();
            if n > 1e-3 && n <= 1.0 {
                return Self(v * (1.0 / n));
            }
        }
    }
}

impl<'de> Deserialize<'de> for UnitVec3 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec3::deserialize(d)?;
        UnitVec3::normalize(v).map_err(serde::de::Error::custom)
    }
}

/// A 3×3 matrix acting on column vectors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub fn apply(&self, v: Vec3) -> Vec3 {
        Vec3(std::array::from_fn(|i| (0..3).map(|k| self.0[i][k] * v.0[k]).sum()))
    }

    /// Rotation by `angle` about the unit `axis` (Rodrigues).
    pub fn rotation(axis: UnitVec3, angle: f64) -> Self {
        let [x, y, z] = axis.0 .0;
        let (s, c) = angle.sin_cos();
        let t = 1.0 - c;
        Mat3([
            [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
            [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
            [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
        ])
    }

    pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let axis = UnitVec3::random(rng);
        Self::rotation(axis, rng.random_range(0.0..std::f64::consts::TAU))
    }
}

/// `(y − x)/|y − x|`.
pub fn gauss(x: Vec3, y: Vec3) -> Result<UnitVec3> {
    let d = y - x;
    if d.norm() == 0.0 {
        return Err(Error::Domain("Gauss map is undefined on the diagonal".into()));
    }
    UnitVec3::normalize(d)
}

/// Derivative of [`gauss`] as a 3×6 matrix on `(h_x, h_y)`:
/// `h ↦ P(h_y − h_x)/|y − x|` with `P` the projection orthogonal to the image.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussJacobian(pub [[f64; 6]; 3]);

impl GaussJacobian {
    pub fn apply(&self, hx: Vec3, hy: Vec3) -> Vec3 {
        let h = [hx.0[0], hx.0[1], hx.0[2], hy.0[0], hy.0[1], hy.0[2]];
        Vec3(std::array::from_fn(|i| (0..6).map(|k| self.0[i][k] * h[k]).sum()))
    }
}

pub fn gauss_jacobian(x: Vec3, y: Vec3) -> Result<GaussJacobian> {
    let u = gauss(x, y)?.vec();
    let r = (y - x).norm();
    let mut m = [[0.0; 6]; 3];
    for i in 0..3 {
        for k in 0..3 {
            let p = if i == k { 1.0 } else { 0.0 } - u.0[i] * u.0[k];
            m[i][k] = -p / r;
            m[i][k + 3] = p / r;
        }
    }
    Ok(GaussJacobian(m))
}

/// Four labeled, pairwise distinct points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub points: [Vec3; NV],
}

impl Configuration {
    pub fn new(points: [Vec3; NV]) -> Result<Self> {
        let c = Self { points };
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::Domain("configuration has a non-finite coordinate".into()));
        }
        if c.min_distance() <= 0.0 {
            return Err(Error::Domain("configuration is not injective".into()));
        }
        Ok(c)
    }

    pub fn min_distance(&self) -> f64 {
        let mut d = f64::INFINITY;
        for i in 0..NV {
            for j in i + 1..NV {
                d = d.min((self.points[i] - self.points[j]).norm());
            }
        }
        d
    }

    pub fn max_distance(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..NV {
            for j in i + 1..NV {
                d = d.max((self.points[i] - self.points[j]).norm());
            }
        }
        d
    }

    pub fn map(&self, f: impl Fn(Vec3) -> Vec3) -> Self {
        Self { points: self.points.map(f) }
    }

    /// Coordinates in the order of the standard basis of `(R^3)^4`.
    pub fn flat(&self) -> [f64; 3 * NV] {
        std::array::from_fn(|i| self.points[i / 3].0[i % 3])
    }
}

/// One direction per edge, indexed by edge id.
#[derive(Clone, Debug, PartialEq)]
pub enum DirectionAssignment {
    /// Rational directions; any positive multiple describes the same chain.
    Exact([[Q; 3]; NE]),
    Float([UnitVec3; NE]),
}

impl DirectionAssignment {
    /// Edge `e` gets `per_label[j(e) − 1]`.
    pub fn exact_from_labels(j: &Labeling, per_label: &[[Q; 3]; NE]) -> Result<Self> {
        for d in per_label {
            if d.iter().all(num_traits::Zero::is_zero) {
                return Err(Error::Domain("zero direction".into()));
            }
        }
        Ok(Self::Exact(std::array::from_fn(|e| per_label[j.label(e) as usize - 1].clone())))
    }

    pub fn float_from_labels(j: &Labeling, per_label: &[UnitVec3; NE]) -> Self {
        Self::Float(std::array::from_fn(|e| per_label[j.label(e) as usize - 1]))
    }

    fn as_f64(&self) -> [Vec3; NE] {
        match self {
            Self::Exact(d) => std::array::from_fn(|e| Vec3(std::array::from_fn(|i| crate::rational::to_f64(&d[e][i])))),
            Self::Float(d) => d.map(|u| u.vec()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeasibilityStatus {
    Feasible,
    Infeasible,
    /// Every solution found puts two points at the same place.
    FeasibleNonInjective,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub points: [Vec3; NV],
    /// Edge lengths `t_e`, by edge id.
    pub lengths: [f64; NE],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeasibilityResult {
    pub status: FeasibilityStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// Dimension of the solution set with vertex 1 pinned at the origin.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family_dimension: Option<usize>,
    pub exact: bool,
}

impl FeasibilityResult {
    pub fn is_feasible(&self) -> bool {
        self.status != FeasibilityStatus::Infeasible
    }
}

const NC: usize = 3 * (NV - 1);

/// Rows `c(head) − c(tail) − t_e a_e = 0` over unknowns `(c_2, c_3, c_4, t)`.
fn equality_rows<F: Field>(g: &EdgeOrientedGraph, dirs: &[[F; 3]; NE]) -> Vec<Vec<F>> {
    let mut rows = Vec::with_capacity(3 * NE);
    for e in 0..NE {
        for i in 0..3 {
            let mut r = vec![F::zero(); NC + NE];
            if g.head(e) > 0 {
                r[3 * (g.head(e) - 1) + i] = r[3 * (g.head(e) - 1) + i].add(&F::one());
            }
            if g.tail(e) > 0 {
                r[3 * (g.tail(e) - 1) + i] = r[3 * (g.tail(e) - 1) + i].sub(&F::one());
            }
            r[NC + e] = dirs[e][i].neg();
            rows.push(r);
        }
    }
    rows
}

/// Decides whether the six chains meet in the open configuration space.
pub fn chain_intersection_feasible(g: &EdgeOrientedGraph, a: &DirectionAssignment) -> Result<FeasibilityResult> {
    match a {
        DirectionAssignment::Exact(d) => solve::<Q>(g, d, true),
        DirectionAssignment::Float(d) => {
            let d: [[f64; 3]; NE] = d.map(|u| u.vec().0);
            solve::<f64>(g, &d, false)
        }
    }
}

fn solve<F: Field>(g: &EdgeOrientedGraph, dirs: &[[F; 3]; NE], exact: bool) -> Result<FeasibilityResult> {
    let eq = equality_rows(g, dirs);
    // LP variables: c split into positive and negative parts, then s = t − 1 ≥ 0.
    let mut a = Vec::with_capacity(eq.len());
    let mut b = Vec::with_capacity(eq.len());
    for (k, r) in eq.iter().enumerate() {
        let mut row = Vec::with_capacity(2 * NC + NE);
        row.extend(r[..NC].iter().cloned());
        row.extend(r[..NC].iter().map(Field::neg));
        row.extend(r[NC..].iter().cloned());
        a.push(row);
        // Moving the constant part of t = 1 + s to the right-hand side.
        b.push(dirs[k / 3][k % 3].clone());
    }
    let x = match phase_one(&a, &b)? {
        LpOutcome::Infeasible => {
            return Ok(FeasibilityResult { status: FeasibilityStatus::Infeasible, witness: None, family_dimension: None, exact })
        }
        LpOutcome::Feasible(x) => x,
    };
    let mut sol: Vec<F> = (0..NC).map(|i| x[i].sub(&x[NC + i])).collect();
    sol.extend((0..NE).map(|e| x[2 * NC + e].add(&F::one())));
    check_solution(&eq, &sol)?;
    let dim = NC + NE - rank(&eq);

    // Vertex solutions may collide; move into the relative interior.
    let kernel = null_space(&eq, NC + NE);
    let doubled: Vec<F> = sol.iter().map(|v| v.add(v)).collect();
    let mut candidate = injective(&doubled).then(|| doubled.clone());
    if candidate.is_none() && !kernel.is_empty() {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(0x5eed);
        'search: for attempt in 0..64 {
            let coeffs: Vec<i64> = kernel.iter().map(|_| rng.random_range(-5i64..=5)).collect();
            let dir: Vec<F> = (0..NC + NE)
                .map(|i| {
                    kernel.iter().zip(&coeffs).fold(F::zero(), |s, (k, &c)| s.add(&k[i].mul(&from_i64::<F>(c))))
                })
                .collect();
            let max_t = dir[NC..].iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
            // Keep every t_e ≥ 1 after the step.
            let denom = 2 * ((max_t.ceil() as i64).max(1)) * (attempt as i64 + 1);
            let step = F::one().div(&from_i64::<F>(denom));
            let moved: Vec<F> = doubled.iter().zip(&dir).map(|(p, d)| p.add(&d.mul(&step))).collect();
            if injective(&moved) && moved[NC..].iter().all(|t| !t.lt(&F::one())) {
                candidate = Some(moved);
                break 'search;
            }
        }
    }
    let Some(best) = candidate else {
        return Ok(FeasibilityResult {
            status: FeasibilityStatus::FeasibleNonInjective,
            witness: None,
            family_dimension: Some(dim),
            exact,
        });
    };
    check_solution(&eq, &best)?;
    let mut points = [Vec3::ZERO; NV];
    for v in 1..NV {
        points[v] = Vec3(std::array::from_fn(|i| best[3 * (v - 1) + i].to_f64()));
    }
    let lengths = std::array::from_fn(|e| best[NC + e].to_f64());
    Ok(FeasibilityResult {
        status: FeasibilityStatus::Feasible,
        witness: Some(Witness { points, lengths }),
        family_dimension: Some(dim),
        exact,
    })
}

fn from_i64<F: Field>(n: i64) -> F {
    let mut acc = F::zero();
    let step = if n >= 0 { F::one() } else { F::one().neg() };
    for _ in 0..n.unsigned_abs() {
        acc = acc.add(&step);
    }
    acc
}

fn check_solution<F: Field>(eq: &[Vec<F>], sol: &[F]) -> Result<()> {
    for r in eq {
        let v = r.iter().zip(sol).fold(F::zero(), |s, (p, q)| s.add(&p.mul(q)));
        if !v.is_zero() {
            return Err(Error::Solver("solution violates an edge constraint".into()));
        }
    }
    if sol[NC..].iter().any(|t| t.lt(&F::one()) && !t.sub(&F::one()).is_zero()) {
        return Err(Error::Solver("solution has an edge length below 1".into()));
    }
    Ok(())
}

fn injective<F: Field>(sol: &[F]) -> bool {
    let point = |v: usize| -> [F; 3] {
        if v == 0 {
            [F::zero(), F::zero(), F::zero()]
        } else {
            std::array::from_fn(|i| sol[3 * (v - 1) + i].clone())
        }
    };
    (0..NV).all(|u| (u + 1..NV).all(|v| (0..3).any(|i| !point(u)[i].sub(&point(v)[i]).is_zero())))
}

/// Comparison of the constraints imposed by two parallel edges.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParallelPair {
    pub edges: [usize; 2],
    /// Same endpoints in the same order with positively proportional
    /// directions: the two chains cut out the same locus.
    pub identical_rows: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParallelReport {
    pub pairs: Vec<ParallelPair>,
    /// Some pair imposes one constraint twice, so no intersection is transverse.
    pub non_transverse: bool,
}

pub fn parallel_edge_coincidence(g: &EdgeOrientedGraph, a: &DirectionAssignment) -> Result<ParallelReport> {
    let mut pairs = Vec::new();
    for e in 0..NE {
        for f in e + 1..NE {
            let same_ends = (g.tail(e), g.head(e)) == (g.tail(f), g.head(f));
            let reversed_ends = (g.tail(e), g.head(e)) == (g.head(f), g.tail(f));
            if !same_ends && !reversed_ends {
                continue;
            }
            let identical_rows = same_ends && positively_proportional(a, e, f);
            pairs.push(ParallelPair { edges: [e, f], identical_rows });
        }
    }
    if pairs.is_empty() {
        return Err(Error::Precondition("graph has no parallel edges".into()));
    }
    let non_transverse = pairs.iter().any(|p| p.identical_rows);
    Ok(ParallelReport { pairs, non_transverse })
}

fn positively_proportional(a: &DirectionAssignment, e: usize, f: usize) -> bool {
    match a {
        DirectionAssignment::Exact(d) => {
            let (x, y) = (&d[e], &d[f]);
            let cross_zero = (0..3).all(|i| (0..3).all(|k| &x[i] * &y[k] == &x[k] * &y[i]));
            let dot: Q = (0..3).map(|i| &x[i] * &y[i]).sum();
            cross_zero && dot > num_traits::Zero::zero()
        }
        DirectionAssignment::Float(_) => {
            let d = a.as_f64();
            d[e].cross(&d[f]).norm() <= 1e-12 && d[e].dot(&d[f]) > 0.0
        }
    }
}
