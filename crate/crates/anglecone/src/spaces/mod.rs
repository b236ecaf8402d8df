//! The metric-space abstraction: a distance oracle plus optional
//! capabilities (tangent probes, geodesics, a reference measure), and the
//! four concrete model spaces used throughout the crate.

mod graph;
pub mod normed;
pub mod sphere;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use graph::Graph;
pub use normed::PExponent;

use crate::error::{Error, Result};

/// A point of a model space: coordinates for the flat spaces and the sphere
/// (where the vector must have ambient norm 1 within 1e-12), or a node id
/// for weighted graphs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    Coords(Vec<f64>),
    Node(usize),
}

impl Point {
    pub fn coords(&self) -> Result<&[f64]> {
        match self {
            Point::Coords(c) => Ok(c),
            Point::Node(_) => Err(Error::PointSpaceMismatch(
                "expected coordinates, got a node id".into(),
            )),
        }
    }

    pub fn node(&self) -> Result<usize> {
        match self {
            Point::Node(n) => Ok(*n),
            Point::Coords(_) => Err(Error::PointSpaceMismatch(
                "expected a node id, got coordinates".into(),
            )),
        }
    }
}

impl From<Vec<f64>> for Point {
    fn from(c: Vec<f64>) -> Self {
        Point::Coords(c)
    }
}

impl From<[f64; 2]> for Point {
    fn from(c: [f64; 2]) -> Self {
        Point::Coords(c.to_vec())
    }
}

impl From<[f64; 3]> for Point {
    fn from(c: [f64; 3]) -> Self {
        Point::Coords(c.to_vec())
    }
}

impl From<usize> for Point {
    fn from(n: usize) -> Self {
        Point::Node(n)
    }
}

/// What a space can do beyond answering distance queries.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Capabilities {
    pub has_tangent_sampler: bool,
    pub has_geodesics: bool,
    pub has_measure_sampler: bool,
    pub length_space: bool,
}

/// Sampling region for the reference measure.
#[derive(Clone, Debug)]
pub enum Region {
    /// Axis-aligned box for the flat spaces.
    Box { min: Vec<f64>, max: Vec<f64> },
    /// The whole sphere with its uniform surface measure.
    Sphere,
    /// Uniform over the listed nodes, or all nodes when `None`.
    Nodes(Option<Vec<usize>>),
}

/// One of the four concrete model spaces.
#[derive(Clone, Debug)]
pub enum Space {
    Euclidean { dim: usize, scale: f64 },
    NormedP { dim: usize, p: PExponent, scale: f64 },
    Sphere { radius: f64 },
    WeightedGraph { graph: Graph },
}

impl Space {
    pub fn euclidean(dim: usize) -> Self {
        Space::Euclidean { dim, scale: 1.0 }
    }

    pub fn normed(dim: usize, p: PExponent) -> Self {
        Space::NormedP { dim, p, scale: 1.0 }
    }

    pub fn sphere(radius: f64) -> Self {
        Space::Sphere { radius }
    }

    pub fn weighted_graph(edges: &[(usize, usize, f64)]) -> Result<Self> {
        Ok(Space::WeightedGraph {
            graph: Graph::from_edges(edges)?,
        })
    }

    pub fn capabilities(&self) -> Capabilities {
        match self {
            Space::Euclidean { .. } => Capabilities {
                has_tangent_sampler: true,
                has_geodesics: true,
                has_measure_sampler: true,
                length_space: true,
            },
            Space::NormedP { p, .. } => Capabilities {
                has_tangent_sampler: true,
                has_geodesics: matches!(p, PExponent::Finite(q) if *q == 2.0),
                has_measure_sampler: true,
                length_space: true,
            },
            Space::Sphere { .. } => Capabilities {
                has_tangent_sampler: true,
                has_geodesics: true,
                has_measure_sampler: true,
                length_space: true,
            },
            Space::WeightedGraph { .. } => Capabilities {
                has_tangent_sampler: false,
                has_geodesics: true,
                has_measure_sampler: true,
                length_space: false,
            },
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Space::Euclidean { dim, scale } if *scale == 1.0 => format!("euclidean(dim={dim})"),
            Space::Euclidean { dim, scale } => format!("euclidean(dim={dim}, scale={scale})"),
            Space::NormedP { dim, p, scale } => {
                let p = match p {
                    PExponent::Finite(q) => format!("{q}"),
                    PExponent::Infinity => "inf".into(),
                };
                if *scale == 1.0 {
                    format!("normed_p(dim={dim}, p={p})")
                } else {
                    format!("normed_p(dim={dim}, p={p}, scale={scale})")
                }
            }
            Space::Sphere { radius } => format!("sphere(radius={radius})"),
            Space::WeightedGraph { graph } => format!(
                "weighted_graph(nodes={}, edges={})",
                graph.node_count(),
                graph.edges().len()
            ),
        }
    }

    pub fn graph(&self) -> Result<&Graph> {
        match self {
            Space::WeightedGraph { graph } => Ok(graph),
            _ => Err(Error::PointSpaceMismatch("not a graph space".into())),
        }
    }

    fn dim(&self) -> Option<usize> {
        match self {
            Space::Euclidean { dim, .. } | Space::NormedP { dim, .. } => Some(*dim),
            Space::Sphere { .. } => Some(3),
            Space::WeightedGraph { .. } => None,
        }
    }

    fn exponent(&self) -> PExponent {
        match self {
            Space::NormedP { p, .. } => *p,
            _ => PExponent::Finite(2.0),
        }
    }

    fn scale(&self) -> f64 {
        match self {
            Space::Euclidean { scale, .. } | Space::NormedP { scale, .. } => *scale,
            _ => 1.0,
        }
    }

    pub fn validate_point(&self, x: &Point) -> Result<()> {
        match self {
            Space::Euclidean { dim, .. } | Space::NormedP { dim, .. } => {
                let c = x.coords()?;
                if c.len() != *dim {
                    return Err(Error::InvalidPoint(format!(
                        "expected {dim} coordinates, got {}",
                        c.len()
                    )));
                }
                if c.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidPoint("non-finite coordinate".into()));
                }
                Ok(())
            }
            Space::Sphere { .. } => {
                let c = x.coords()?;
                if c.len() != 3 {
                    return Err(Error::InvalidPoint(format!(
                        "sphere points have 3 ambient coordinates, got {}",
                        c.len()
                    )));
                }
                let n = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
                if (n - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidPoint(format!(
                        "sphere point has ambient norm {n}, expected 1 within 1e-12"
                    )));
                }
                Ok(())
            }
            Space::WeightedGraph { graph } => graph.check_node(x.node()?),
        }
    }

    fn unit3(&self, x: &Point) -> Result<[f64; 3]> {
        self.validate_point(x)?;
        let c = x.coords()?;
        sphere::normalize([c[0], c[1], c[2]])
            .ok_or_else(|| Error::InvalidPoint("zero sphere point".into()))
    }

    /// The metric distance d(a, b).
    pub fn distance(&self, a: &Point, b: &Point) -> Result<f64> {
        match self {
            Space::Euclidean { scale, .. } => {
                self.validate_point(a)?;
                self.validate_point(b)?;
                let (ca, cb) = (a.coords()?, b.coords()?);
                let diff: Vec<f64> = ca.iter().zip(cb).map(|(x, y)| x - y).collect();
                Ok(scale * normed::norm(&diff, PExponent::Finite(2.0)))
            }
            Space::NormedP { p, scale, .. } => {
                self.validate_point(a)?;
                self.validate_point(b)?;
                let (ca, cb) = (a.coords()?, b.coords()?);
                let diff: Vec<f64> = ca.iter().zip(cb).map(|(x, y)| x - y).collect();
                Ok(scale * normed::norm(&diff, *p))
            }
            Space::Sphere { radius } => {
                let ua = self.unit3(a)?;
                let ub = self.unit3(b)?;
                Ok(radius * sphere::angle(&ua, &ub))
            }
            Space::WeightedGraph { graph } => graph.distance(a.node()?, b.node()?),
        }
    }

    /// `d(z, y) - d(z, x)` for arbitrary points; no special stabilization,
    /// used on graphs (where it is exact) and for coarse checks.
    pub fn distance_delta(&self, z: &Point, x: &Point, y: &Point) -> Result<f64> {
        match self {
            Space::WeightedGraph { graph } => {
                let dist = graph.distances_from(z.node()?);
                graph.check_node(x.node()?)?;
                graph.check_node(y.node()?)?;
                let (dx, dy) = (dist[x.node()?], dist[y.node()?]);
                if !dx.is_finite() || !dy.is_finite() {
                    return Err(Error::Disconnected(z.node()?, x.node()?));
                }
                Ok(dy - dx)
            }
            _ => Ok(self.distance(z, y)? - self.distance(z, x)?),
        }
    }

    /// Multiplies every pairwise distance by `lambda`.
    pub fn rescale(&self, lambda: f64) -> Result<Space> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "rescale factor must be positive, got {lambda}"
            )));
        }
        Ok(match self {
            Space::Euclidean { dim, scale } => Space::Euclidean {
                dim: *dim,
                scale: scale * lambda,
            },
            Space::NormedP { dim, p, scale } => Space::NormedP {
                dim: *dim,
                p: *p,
                scale: scale * lambda,
            },
            Space::Sphere { radius } => Space::Sphere {
                radius: radius * lambda,
            },
            Space::WeightedGraph { graph } => {
                let edges: Vec<_> = graph
                    .edges()
                    .iter()
                    .map(|&(u, v, w)| (u, v, w * lambda))
                    .collect();
                Space::WeightedGraph {
                    graph: Graph::from_edges(&edges)?,
                }
            }
        })
    }

    /// Natural sampling region covering the standard fixtures: the unit box
    /// for flat spaces, the whole sphere, every node for graphs.
    pub fn default_region(&self) -> Region {
        match self {
            Space::Euclidean { dim, .. } | Space::NormedP { dim, .. } => Region::Box {
                min: vec![0.0; *dim],
                max: vec![1.0; *dim],
            },
            Space::Sphere { .. } => Region::Sphere,
            Space::WeightedGraph { .. } => Region::Nodes(None),
        }
    }

    /// Deterministic i.i.d.-style samples from the reference measure.
    pub fn measure_sample(&self, region: &Region, n: usize, seed: u64) -> Result<Vec<Point>> {
        if n == 0 {
            return Err(Error::InvalidArgument("sample count must be >= 1".into()));
        }
        let caps = self.capabilities();
        if !caps.has_measure_sampler {
            return Err(Error::MissingCapability("measure sampler"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6d65_6173);
        match (self, region) {
            (Space::Euclidean { dim, .. } | Space::NormedP { dim, .. }, Region::Box { min, max }) => {
                if min.len() != *dim || max.len() != *dim {
                    return Err(Error::InvalidArgument(format!(
                        "region dimension {} does not match space dimension {dim}",
                        min.len()
                    )));
                }
                if min.iter().zip(max).any(|(a, b)| !(a < b)) {
                    return Err(Error::EmptyRegion);
                }
                Ok((0..n)
                    .map(|_| {
                        Point::Coords(
                            min.iter()
                                .zip(max)
                                .map(|(&a, &b)| rng.gen_range(a..b))
                                .collect(),
                        )
                    })
                    .collect())
            }
            (Space::Sphere { .. }, Region::Sphere) => Ok((0..n)
                .map(|_| {
                    let z: f64 = rng.gen_range(-1.0..1.0);
                    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    Point::Coords(vec![r * phi.cos(), r * phi.sin(), z])
                })
                .collect()),
            (Space::WeightedGraph { graph }, Region::Nodes(sel)) => {
                let pool: Vec<usize> = match sel {
                    Some(ids) => {
                        for &id in ids {
                            graph.check_node(id)?;
                        }
                        ids.clone()
                    }
                    None => (0..graph.node_count()).collect(),
                };
                if pool.is_empty() {
                    return Err(Error::EmptyRegion);
                }
                Ok((0..n)
                    .map(|_| Point::Node(pool[rng.gen_range(0..pool.len())]))
                    .collect())
            }
            _ => Err(Error::InvalidArgument(
                "region kind does not match space kind".into(),
            )),
        }
    }

    /// Probe directions at `x`: `n` seeded low-discrepancy directions, always
    /// augmented with the structured directions toward and away from every
    /// reference point in `refs` plus their pairwise signed combinations
    /// (renormalized in the space's own norm), which is where the extremal
    /// difference quotients of distance fields live.
    pub fn sample_directions(
        &self,
        x: &Point,
        n: usize,
        seed: u64,
        refs: &[Point],
    ) -> Result<Vec<TangentProbe>> {
        if !self.capabilities().has_tangent_sampler {
            return Err(Error::MissingCapability("tangent sampler"));
        }
        if n == 0 {
            return Err(Error::InvalidArgument("direction count must be >= 1".into()));
        }
        self.validate_point(x)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6469_7273);
        match self {
            Space::Euclidean { dim, scale } | Space::NormedP { dim, scale, .. } => {
                let p = self.exponent();
                let base = x.coords()?.to_vec();
                let mut raw: Vec<Vec<f64>> = Vec::with_capacity(n);
                if *dim == 2 {
                    let offset: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                    for i in 0..n {
                        let th = offset + std::f64::consts::TAU * (i as f64) / (n as f64);
                        raw.push(vec![th.cos(), th.sin()]);
                    }
                } else {
                    for _ in 0..n {
                        raw.push(gaussian_vec(&mut rng, *dim));
                    }
                }
                let mut toward: Vec<Vec<f64>> = Vec::new();
                for z in refs {
                    if let Ok(zc) = z.coords() {
                        if zc.len() == *dim {
                            let v: Vec<f64> = zc.iter().zip(&base).map(|(a, b)| a - b).collect();
                            let nv = normed::norm(&v, p);
                            if nv > 0.0 && nv.is_finite() {
                                toward.push(v.iter().map(|c| c / nv).collect());
                            }
                        }
                    }
                }
                raw.extend(pair_combinations(&toward));
                let probes = raw
                    .into_iter()
                    .filter_map(|v| {
                        let nv = normed::norm(&v, p);
                        if nv == 0.0 || !nv.is_finite() {
                            return None;
                        }
                        Some(TangentProbe {
                            kind: ProbeKind::Linear {
                                base: base.clone(),
                                dir: v.iter().map(|c| c / nv).collect(),
                                scale: *scale,
                                p,
                            },
                        })
                    })
                    .collect();
                Ok(probes)
            }
            Space::Sphere { radius } => {
                let ux = self.unit3(x)?;
                let (e1, e2) = sphere::tangent_basis(&ux);
                let offset: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                let mut dirs: Vec<[f64; 3]> = Vec::with_capacity(n);
                for i in 0..n {
                    let th = offset + std::f64::consts::TAU * (i as f64) / (n as f64);
                    let (c, s) = (th.cos(), th.sin());
                    dirs.push([
                        c * e1[0] + s * e2[0],
                        c * e1[1] + s * e2[1],
                        c * e1[2] + s * e2[2],
                    ]);
                }
                let mut toward: Vec<Vec<f64>> = Vec::new();
                for z in refs {
                    if let Ok(uz) = self.unit3(z) {
                        if let Some(u) = sphere::project_tangent(&ux, &uz) {
                            toward.push(u.to_vec());
                        }
                    }
                }
                for v in pair_combinations(&toward) {
                    if let Some(u) = sphere::project_tangent(&ux, &[v[0], v[1], v[2]]) {
                        dirs.push(u);
                    }
                }
                Ok(dirs
                    .into_iter()
                    .map(|u| TangentProbe {
                        kind: ProbeKind::Great {
                            base: ux,
                            tangent: u,
                            radius: *radius,
                        },
                    })
                    .collect())
            }
            Space::WeightedGraph { .. } => Err(Error::MissingCapability("tangent sampler")),
        }
    }

    /// Stable `field-of-distance` delta `d(z, probe.step(t)) - d(z, probe.base)`.
    pub fn ref_delta(&self, z: &Point, probe: &TangentProbe, t: f64) -> Result<f64> {
        match (&probe.kind, self) {
            (ProbeKind::Linear { base, dir, scale, p }, _) => {
                let zc = z.coords()?;
                if zc.len() != base.len() {
                    return Err(Error::InvalidPoint("reference dimension mismatch".into()));
                }
                let w: Vec<f64> = base.iter().zip(zc).map(|(a, b)| a - b).collect();
                Ok(scale * normed::norm_delta(&w, dir, t / scale, *p))
            }
            (ProbeKind::Great { base, tangent, radius }, _) => {
                let uz = self.unit3(z)?;
                Ok(radius * sphere::angle_delta(&uz, base, tangent, t / radius))
            }
        }
    }
}

/// Signed pairwise combinations of the toward-vectors; the extremal
/// directions of Examples 2.5/2.6-type configurations are sums and
/// differences of single-reference directions, not the directions themselves.
fn pair_combinations(toward: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in toward {
        out.push(v.clone());
        out.push(v.iter().map(|c| -c).collect());
    }
    for i in 0..toward.len() {
        for j in (i + 1)..toward.len() {
            for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let v: Vec<f64> = toward[i]
                    .iter()
                    .zip(&toward[j])
                    .map(|(a, b)| si * a + sj * b)
                    .collect();
                out.push(v);
            }
        }
    }
    out
}

fn gaussian_vec(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    // Box-Muller; rand_distr is not needed for this one use.
    let mut v = Vec::with_capacity(dim);
    while v.len() < dim {
        let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let r = (-2.0 * u1.ln()).sqrt();
        v.push(r * u2.cos());
        if v.len() < dim {
            v.push(r * u2.sin());
        }
    }
    v
}

/// A calibrated one-sided probe: `step(t)` is at metric distance `t` from
/// the base point (exactly for flat spaces, within the injectivity radius
/// for the sphere).
#[derive(Clone, Debug)]
pub struct TangentProbe {
    kind: ProbeKind,
}

#[derive(Clone, Debug)]
enum ProbeKind {
    Linear {
        base: Vec<f64>,
        dir: Vec<f64>,
        scale: f64,
        p: PExponent,
    },
    Great {
        base: [f64; 3],
        tangent: [f64; 3],
        radius: f64,
    },
}

impl TangentProbe {
    pub fn base(&self) -> Point {
        match &self.kind {
            ProbeKind::Linear { base, .. } => Point::Coords(base.clone()),
            ProbeKind::Great { base, .. } => Point::Coords(base.to_vec()),
        }
    }

    /// The point at metric distance ~t along the probe.
    pub fn step(&self, t: f64) -> Point {
        match &self.kind {
            ProbeKind::Linear { base, dir, scale, .. } => {
                let o = t / scale;
                Point::Coords(base.iter().zip(dir).map(|(b, d)| b + o * d).collect())
            }
            ProbeKind::Great {
                base,
                tangent,
                radius,
            } => {
                let y = sphere::step(base, tangent, t / radius);
                let y = sphere::normalize(y).unwrap_or(*base);
                Point::Coords(y.to_vec())
            }
        }
    }

    /// Ambient direction vector, for sector filters and diagnostics.
    pub fn ambient_direction(&self) -> &[f64] {
        match &self.kind {
            ProbeKind::Linear { dir, .. } => dir,
            ProbeKind::Great { tangent, .. } => tangent,
        }
    }
}

/// JSON space configuration, the on-disk interface.
#[derive(Debug, Serialize, Deserialize)]
pub struct SpaceConfig {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<PExponent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<(usize, usize, f64)>>,
}

impl SpaceConfig {
    pub fn build(&self) -> Result<Space> {
        match self.kind.as_str() {
            "euclidean" => {
                let dim = self
                    .dimension
                    .ok_or_else(|| Error::InvalidSpace("euclidean needs \"dimension\"".into()))?;
                if dim == 0 {
                    return Err(Error::InvalidSpace("dimension must be >= 1".into()));
                }
                Ok(Space::euclidean(dim))
            }
            "normed_p" => {
                let dim = self
                    .dimension
                    .ok_or_else(|| Error::InvalidSpace("normed_p needs \"dimension\"".into()))?;
                let p = self
                    .p
                    .ok_or_else(|| Error::InvalidSpace("normed_p needs \"p\"".into()))?
                    .validate()?;
                if dim == 0 {
                    return Err(Error::InvalidSpace("dimension must be >= 1".into()));
                }
                Ok(Space::normed(dim, p))
            }
            "sphere" => {
                let radius = self.radius.unwrap_or(1.0);
                if !(radius > 0.0) {
                    return Err(Error::InvalidSpace("radius must be positive".into()));
                }
                Ok(Space::sphere(radius))
            }
            "weighted_graph" => {
                let edges = self
                    .edges
                    .as_ref()
                    .ok_or_else(|| Error::InvalidSpace("weighted_graph needs \"edges\"".into()))?;
                Space::weighted_graph(edges)
            }
            other => Err(Error::InvalidSpace(format!("unknown kind {other:?}"))),
        }
    }
}

impl Space {
    pub fn from_json(text: &str) -> Result<Space> {
        let cfg: SpaceConfig = serde_json::from_str(text)?;
        cfg.build()
    }

    /// Edge-list CSV alternative for graphs: one `u,v,w` line per edge.
    pub fn from_edge_csv(text: &str) -> Result<Space> {
        let mut edges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(Error::InvalidSpace(format!(
                    "line {}: expected \"u,v,w\"",
                    lineno + 1
                )));
            }
            let u: usize = parts[0]
                .parse()
                .map_err(|e| Error::InvalidSpace(format!("line {}: {e}", lineno + 1)))?;
            let v: usize = parts[1]
                .parse()
                .map_err(|e| Error::InvalidSpace(format!("line {}: {e}", lineno + 1)))?;
            let w: f64 = parts[2]
                .parse()
                .map_err(|e| Error::InvalidSpace(format!("line {}: {e}", lineno + 1)))?;
            edges.push((u, v, w));
        }
        Space::weighted_graph(&edges)
    }
}
