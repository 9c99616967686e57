//! Two-branch pointer-labelled ensembles and their interference visibility.
//!
//! A spin-like two-level system conditionally drives a massive packet: the
//! "down" branch evolves under one Lagrangian, the "up" branch under another.
//! Whether a record of the branch exists is encoded in the overlap of the
//! pointer states attached to each branch.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::propagator::{propagate_sliced, LagrangianSpec, TimeSlicing};
use crate::units::UnitSystem;
use crate::wave::{inner_product, WaveFunction};
use crate::wavepacket::GaussianPacket;

const HERMITIAN_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;
const NORM_TOL: f64 = 1e-9;
/// Phase samples used for fringe sweeps.
pub const FRINGE_PHASES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PointerLabel(String);

impl PointerLabel {
    pub fn new(id: impl Into<String>) -> Result<Self> {
        let id = id.into();
        if id.is_empty() {
            return Err(Error::InvalidParameter("pointer label must be nonempty".into()));
        }
        Ok(Self(id))
    }

    pub fn id(&self) -> &str {
        &self.0
    }
}

/// Gram matrix of pointer states: Hermitian, unit diagonal, positive
/// semidefinite, entries bounded by 1 in modulus.
#[derive(Debug, Clone, PartialEq)]
pub struct PointerOverlapMatrix {
    labels: Vec<PointerLabel>,
    overlaps: Vec<Complex64>,
}

impl PointerOverlapMatrix {
    /// `overlaps` is row-major, `overlaps[i*n + j] = ⟨label_i|label_j⟩`.
    pub fn new(labels: Vec<PointerLabel>, overlaps: Vec<Complex64>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidParameter("overlap matrix needs at least one label".into()));
        }
        if overlaps.len() != n * n {
            return Err(Error::InvalidParameter(format!(
                "overlap matrix for {n} labels needs {} entries, got {}",
                n * n,
                overlaps.len()
            )));
        }
        for i in 0..n {
            if labels[..i].contains(&labels[i]) {
                return Err(Error::InvalidParameter(format!("duplicate pointer label '{}'", labels[i].id())));
            }
        }
        for (k, z) in overlaps.iter().enumerate() {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite("pointer overlap".into()));
            }
            if z.norm() > 1.0 + HERMITIAN_TOL {
                return Err(Error::InvalidParameter(format!("|overlap| = {} exceeds 1 at entry {k}", z.norm())));
            }
        }
        for i in 0..n {
            if overlaps[i * n + i] != Complex64::new(1.0, 0.0) {
                return Err(Error::InvalidParameter(format!("diagonal entry {i} must be exactly 1")));
            }
            for j in 0..i {
                if (overlaps[i * n + j] - overlaps[j * n + i].conj()).norm() > HERMITIAN_TOL {
                    return Err(Error::InvalidParameter(format!("overlap matrix not Hermitian at ({i},{j})")));
                }
            }
        }
        if !is_positive_semidefinite(&overlaps, n) {
            return Err(Error::InvalidParameter("overlap matrix is not positive semidefinite".into()));
        }
        Ok(Self { labels, overlaps })
    }

    /// Mutually orthogonal pointers.
    pub fn orthogonal(labels: Vec<PointerLabel>) -> Result<Self> {
        let n = labels.len();
        let mut m = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            m[i * n + i] = Complex64::new(1.0, 0.0);
        }
        Self::new(labels, m)
    }

    /// Two pointers with `⟨a|b⟩ = overlap`.
    pub fn pair(a: PointerLabel, b: PointerLabel, overlap: Complex64) -> Result<Self> {
        let one = Complex64::new(1.0, 0.0);
        Self::new(vec![a, b], vec![one, overlap, overlap.conj(), one])
    }

    pub fn labels(&self) -> &[PointerLabel] {
        &self.labels
    }

    pub fn index_of(&self, label: &PointerLabel) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn get(&self, a: &PointerLabel, b: &PointerLabel) -> Option<Complex64> {
        let n = self.labels.len();
        Some(self.overlaps[self.index_of(a)? * n + self.index_of(b)?])
    }

    /// Multiplies every off-diagonal entry by `s ∈ [0, 1]`. The result stays
    /// positive semidefinite: it is a convex mix of the matrix and identity.
    pub fn decohere(&self, s: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::InvalidParameter(format!("decoherence factor must lie in [0, 1], got {s}")));
        }
        let n = self.labels.len();
        let mut m = self.overlaps.clone();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    m[i * n + j] *= s;
                }
            }
        }
        Self::new(self.labels.clone(), m)
    }
}

/// Semidefinite Cholesky with a small pivot tolerance.
fn is_positive_semidefinite(a: &[Complex64], n: usize) -> bool {
    let mut l = vec![Complex64::new(0.0, 0.0); n * n];
    for k in 0..n {
        let s = a[k * n + k].re - (0..k).map(|j| l[k * n + j].norm_sqr()).sum::<f64>();
        if s < -PSD_TOL {
            return false;
        }
        if s <= PSD_TOL {
            for i in k + 1..n {
                let r = a[i * n + k] - (0..k).map(|j| l[i * n + j] * l[k * n + j].conj()).sum::<Complex64>();
                if r.norm() > PSD_TOL.sqrt() {
                    return false;
                }
            }
            continue;
        }
        let d = s.sqrt();
        l[k * n + k] = Complex64::new(d, 0.0);
        for i in k + 1..n {
            let r = a[i * n + k] - (0..k).map(|j| l[i * n + j] * l[k * n + j].conj()).sum::<Complex64>();
            l[i * n + k] = r / d;
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pointer: PointerLabel,
    weight: Complex64,
    psi: WaveFunction,
}

impl Branch {
    pub fn new(pointer: PointerLabel, weight: Complex64, psi: WaveFunction) -> Result<Self> {
        if !(weight.re.is_finite() && weight.im.is_finite()) {
            return Err(Error::NonFinite("branch weight".into()));
        }
        if (psi.norm() - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParameter(format!("branch state must be normalised, norm = {}", psi.norm())));
        }
        Ok(Self { pointer, weight, psi })
    }

    pub fn pointer(&self) -> &PointerLabel {
        &self.pointer
    }

    pub fn weight(&self) -> Complex64 {
        self.weight
    }

    pub fn psi(&self) -> &WaveFunction {
        &self.psi
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchEnsemble {
    branches: Vec<Branch>,
    overlap: PointerOverlapMatrix,
    units: UnitSystem,
}

impl BranchEnsemble {
    pub fn new(branches: Vec<Branch>, overlap: PointerOverlapMatrix, units: UnitSystem) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::BranchCount(0));
        }
        for b in &branches {
            if overlap.index_of(&b.pointer).is_none() {
                return Err(Error::InvalidParameter(format!(
                    "pointer '{}' missing from overlap matrix",
                    b.pointer.id()
                )));
            }
        }
        let total: f64 = branches.iter().map(|b| b.weight.norm_sqr()).sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParameter(format!("branch weights must satisfy Σ|w|² = 1, got {total}")));
        }
        Ok(Self { branches, overlap, units })
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn overlap_matrix(&self) -> &PointerOverlapMatrix {
        &self.overlap
    }

    pub fn units(&self) -> &UnitSystem {
        &self.units
    }

    /// `⟨pointer_i|pointer_j⟩`.
    pub fn pointer_overlap(&self, i: usize, j: usize) -> Complex64 {
        self.overlap
            .get(&self.branches[i].pointer, &self.branches[j].pointer)
            .expect("pointers validated at construction")
    }

    /// Same branches with every off-diagonal pointer overlap scaled by `s`.
    ///
    /// Branches sharing one pointer are first given distinct labels with
    /// overlap 1, so that the scaling acts between them.
    pub fn decohere(&self, s: f64) -> Result<Self> {
        let mut branches = self.branches.clone();
        let shared = branches.len() == 2 && branches[0].pointer == branches[1].pointer;
        let overlap = if shared {
            let a = PointerLabel::new(format!("{}-0", branches[0].pointer.id()))?;
            let b = PointerLabel::new(format!("{}-1", branches[1].pointer.id()))?;
            branches[0].pointer = a.clone();
            branches[1].pointer = b.clone();
            PointerOverlapMatrix::pair(a, b, Complex64::new(1.0, 0.0))?.decohere(s)?
        } else {
            self.overlap.decohere(s)?
        };
        Self::new(branches, overlap, self.units)
    }

    fn pair(&self) -> Result<(&Branch, &Branch, Complex64)> {
        if self.branches.len() != 2 {
            return Err(Error::BranchCount(self.branches.len()));
        }
        Ok((&self.branches[0], &self.branches[1], self.pointer_overlap(0, 1)))
    }
}

/// Whether the experiment leaves a record of which branch was taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecordMode {
    WhichPath,
    NoRecord,
}

impl RecordMode {
    pub fn name(&self) -> &'static str {
        match self {
            RecordMode::WhichPath => "which-path",
            RecordMode::NoRecord => "none",
        }
    }
}

/// One piece of a piecewise-constant Lagrangian schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub lagrangian: LagrangianSpec,
    pub slicing: TimeSlicing,
}

impl Segment {
    pub fn new(lagrangian: LagrangianSpec, slicing: TimeSlicing) -> Self {
        Self { lagrangian, slicing }
    }
}

fn evolve_schedule(psi: &WaveFunction, schedule: &[Segment], units: &UnitSystem) -> Result<WaveFunction> {
    let mut out = psi.clone();
    for seg in schedule {
        out = propagate_sliced(&out, &seg.slicing, &seg.lagrangian, units)?;
    }
    out.normalize()
}

fn check_spin(spin: (Complex64, Complex64)) -> Result<()> {
    let total = spin.0.norm_sqr() + spin.1.norm_sqr();
    if !total.is_finite() {
        return Err(Error::NonFinite("spin amplitudes".into()));
    }
    if (total - 1.0).abs() > NORM_TOL {
        return Err(Error::InvalidParameter(format!(
            "spin amplitudes must satisfy |a_down|² + |a_up|² = 1, got {total}"
        )));
    }
    Ok(())
}

/// Evolves the packet conditionally on the spin: the down branch under
/// `lagrangian_down`, the up branch under `lagrangian_up`, both over `slicing`.
#[allow(clippy::too_many_arguments)]
pub fn evolve_conditional(
    spin: (Complex64, Complex64),
    elevator_initial: &GaussianPacket,
    lagrangian_up: &LagrangianSpec,
    lagrangian_down: &LagrangianSpec,
    slicing: &TimeSlicing,
    grid: &Grid1D,
    record: RecordMode,
    units: &UnitSystem,
) -> Result<BranchEnsemble> {
    evolve_conditional_schedule(
        spin,
        elevator_initial,
        &[Segment::new(lagrangian_up.clone(), *slicing)],
        &[Segment::new(lagrangian_down.clone(), *slicing)],
        grid,
        record,
        units,
    )
}

/// [`evolve_conditional`] with piecewise-constant Lagrangians per branch.
/// Output order is fixed: down branch first, up branch second.
pub fn evolve_conditional_schedule(
    spin: (Complex64, Complex64),
    elevator_initial: &GaussianPacket,
    schedule_up: &[Segment],
    schedule_down: &[Segment],
    grid: &Grid1D,
    record: RecordMode,
    units: &UnitSystem,
) -> Result<BranchEnsemble> {
    check_spin(spin)?;
    let psi0 = elevator_initial.wavefunction(*grid, units)?;
    let (down, up) =
        rayon::join(|| evolve_schedule(&psi0, schedule_down, units), || evolve_schedule(&psi0, schedule_up, units));
    let (down, up) = (down?, up?);
    let (pointer_down, pointer_up, overlap) = match record {
        RecordMode::WhichPath => {
            let a = PointerLabel::new("spin-down-record")?;
            let b = PointerLabel::new("spin-up-record")?;
            let m = PointerOverlapMatrix::orthogonal(vec![a.clone(), b.clone()])?;
            (a, b, m)
        }
        RecordMode::NoRecord => {
            let a = PointerLabel::new("no-record")?;
            let m = PointerOverlapMatrix::orthogonal(vec![a.clone()])?;
            (a.clone(), a, m)
        }
    };
    BranchEnsemble::new(
        vec![Branch::new(pointer_down, spin.0, down)?, Branch::new(pointer_up, spin.1, up)?],
        overlap,
        *units,
    )
}

/// `V = 2|w₁ w₂*|·|o₁₂|·|⟨ψ₁|ψ₂⟩| / (|w₁|² + |w₂|²)`.
pub fn visibility(ensemble: &BranchEnsemble) -> Result<f64> {
    let (b1, b2, o12) = ensemble.pair()?;
    let denom = b1.weight.norm_sqr() + b2.weight.norm_sqr();
    if o12 == Complex64::new(0.0, 0.0) {
        return Ok(0.0);
    }
    let s = inner_product(&b1.psi, &b2.psi)?;
    let v = 2.0 * (b1.weight * b2.weight.conj()).norm() * o12.norm() * s.norm() / denom;
    Ok(v.clamp(0.0, 1.0))
}

/// Probability of finding the packet in `detector` when the up branch carries
/// an extra phase `φ`: the pointer-weighted coherent sum plus the incoherent
/// remainder.
pub fn outcome_distribution(ensemble: &BranchEnsemble, phi: f64, detector: &WaveFunction) -> Result<f64> {
    let (b1, b2, o12) = ensemble.pair()?;
    if detector.grid() != b1.psi.grid() {
        return Err(Error::GridMismatch);
    }
    if (detector.norm() - 1.0).abs() > NORM_TOL {
        return Err(Error::InvalidParameter(format!("detector must be normalised, norm = {}", detector.norm())));
    }
    let a1 = b1.weight * inner_product(detector, &b1.psi)?;
    let a2 = b2.weight * inner_product(detector, &b2.psi)?;
    let coherent = a1 + Complex64::from_polar(1.0, phi) * o12 * a2;
    Ok(coherent.norm_sqr() + (1.0 - o12.norm_sqr()) * a2.norm_sqr())
}

/// `P(φ)` at `n` equally spaced phases in `[0, 2π)`.
pub fn phase_sweep(ensemble: &BranchEnsemble, detector: &WaveFunction, n: usize) -> Result<Vec<(f64, f64)>> {
    (0..n)
        .map(|k| {
            let phi = 2.0 * PI * k as f64 / n as f64;
            Ok((phi, outcome_distribution(ensemble, phi, detector)?))
        })
        .collect()
}

/// Half the peak-to-peak swing of `P(φ)` over a [`FRINGE_PHASES`]-point sweep.
pub fn fringe_contrast(ensemble: &BranchEnsemble, detector: &WaveFunction) -> Result<f64> {
    let sweep = phase_sweep(ensemble, detector, FRINGE_PHASES)?;
    let (lo, hi) = sweep.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, p)| (lo.min(p), hi.max(p)));
    Ok(0.5 * (hi - lo))
}

/// Detector matched to the first (down) branch.
pub fn reference_detector(ensemble: &BranchEnsemble) -> Result<WaveFunction> {
    let (b1, _, _) = ensemble.pair()?;
    Ok(b1.psi.clone())
}

fn push(mass: f64, force: f64, duration: f64, n_slices: usize) -> Result<Segment> {
    Ok(Segment::new(LagrangianSpec::constant_force(mass, force)?, TimeSlicing::new(duration, n_slices)?))
}

fn check_schedule_args(duration: f64, n_slices: usize, pieces: usize) -> Result<()> {
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(Error::InvalidParameter(format!("duration must be positive, got {duration}")));
    }
    if n_slices < pieces || !n_slices.is_multiple_of(pieces) {
        return Err(Error::InvalidParameter(format!("slice count {n_slices} must be a positive multiple of {pieces}")));
    }
    Ok(())
}

/// Single constant force over `duration` that moves the packet by `distance`
/// (`F = 2md/T²`); the packet ends with momentum `2md/T`.
pub fn push_schedule(mass: f64, distance: f64, duration: f64, n_slices: usize) -> Result<Vec<Segment>> {
    check_schedule_args(duration, n_slices, 1)?;
    Ok(vec![push(mass, 2.0 * mass * distance / (duration * duration), duration, n_slices)?])
}

/// `+F` then `−F` over two halves: the packet rises by `distance` and ends at
/// rest (`F = 4md/T²`).
pub fn lift_schedule(mass: f64, distance: f64, duration: f64, n_slices: usize) -> Result<Vec<Segment>> {
    check_schedule_args(duration, n_slices, 2)?;
    let f = 4.0 * mass * distance / (duration * duration);
    let (h, n) = (0.5 * duration, n_slices / 2);
    Ok(vec![push(mass, f, h, n)?, push(mass, -f, h, n)?])
}

/// Lift by `distance` over the first half, then return to `residual` over the
/// second half, ending at rest. Quarter segments `+F, −F, −F', +F'` with
/// `F = 16md/T²` and `F' = 16m(d − residual)/T²`.
pub fn recombining_schedule(
    mass: f64,
    distance: f64,
    residual: f64,
    duration: f64,
    n_slices: usize,
) -> Result<Vec<Segment>> {
    check_schedule_args(duration, n_slices, 4)?;
    let k = 16.0 * mass / (duration * duration);
    let (f, f_back) = (k * distance, k * (distance - residual));
    let (q, n) = (0.25 * duration, n_slices / 4);
    Ok(vec![push(mass, f, q, n)?, push(mass, -f, q, n)?, push(mass, -f_back, q, n)?, push(mass, f_back, q, n)?])
}

/// Static spin-down schedule matching the slicing of an up schedule.
pub fn static_schedule(mass: f64, up: &[Segment]) -> Result<Vec<Segment>> {
    let free = LagrangianSpec::free(mass)?;
    Ok(up.iter().map(|s| Segment::new(free.clone(), s.slicing)).collect())
}

/// Residual offset `δ` whose packet overlap `exp(−δ²/8σ₀²)` equals `target`.
pub fn residual_for_overlap(sigma0: f64, target: f64) -> Result<f64> {
    if !(target > 0.0 && target <= 1.0) {
        return Err(Error::InvalidParameter(format!("target overlap must lie in (0, 1], got {target}")));
    }
    Ok(sigma0 * (-8.0 * target.ln()).sqrt())
}

/// `|⟨ψ_static|ψ_pushed⟩|` after [`push_schedule`], for a minimum-uncertainty
/// packet of width `σ₀`: `exp(−d²/8σ₀² − 2m²d²σ₀²/ħ²T²)`.
pub fn push_overlap(mass: f64, sigma0: f64, distance: f64, duration: f64, units: &UnitSystem) -> f64 {
    let d2 = distance * distance;
    let hbar = units.hbar();
    (-d2 / (8.0 * sigma0 * sigma0) - 2.0 * mass * mass * d2 * sigma0 * sigma0 / (hbar * hbar * duration * duration))
        .exp()
}

/// Geometry shared by the mass sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PushGeometry {
    pub sigma0: f64,
    pub distance: f64,
    pub duration: f64,
    pub n_slices: usize,
}

impl Default for PushGeometry {
    fn default() -> Self {
        Self { sigma0: 0.5, distance: 0.05, duration: 1.0, n_slices: 32 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MassSweepRow {
    pub mass: f64,
    pub visibility: f64,
    pub predicted: f64,
}

/// Record-free visibility between a static and a pushed packet as a function
/// of mass, with the geometry held fixed.
pub fn mass_sweep(
    masses: &[f64],
    geometry: &PushGeometry,
    grid: &Grid1D,
    units: &UnitSystem,
) -> Result<Vec<MassSweepRow>> {
    let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    masses
        .iter()
        .map(|&m| {
            let up = push_schedule(m, geometry.distance, geometry.duration, geometry.n_slices)?;
            let down = static_schedule(m, &up)?;
            let packet = GaussianPacket::new(m, 0.0, geometry.sigma0, 0.0)?;
            let ens = evolve_conditional_schedule((a, a), &packet, &up, &down, grid, RecordMode::NoRecord, units)?;
            Ok(MassSweepRow {
                mass: m,
                visibility: visibility(&ens)?,
                predicted: push_overlap(m, geometry.sigma0, geometry.distance, geometry.duration, units),
            })
        })
        .collect()
}
