//! The analysis report: a machine-readable summary of everything the
//! pipeline detected, computed, and verified, with every numeric claim
//! paired with the tolerance it was checked against.

use std::fmt::Write as _;

use crate::perron::PeripheralReport;
use crate::spectral::{ComponentPropertyReport, ResidualCheck};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, serde::Serialize)]
pub struct InputDescriptor {
    pub path: Option<String>,
    pub format: Option<String>,
    pub rows: usize,
    pub cols: usize,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct Tolerances {
    /// Absolute pattern tolerance used for the digraph.
    pub zero_tol: f64,
    /// Relative tolerance for chain residuals and component properties.
    pub chain_tol: f64,
    /// Relative tolerance for eigenvalue clustering and orbit pairing.
    pub orbit_tol: f64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct CyclicSummary {
    pub h: usize,
    pub primitive: bool,
    /// Partition classes in 1-based vertex labels.
    pub partition: Vec<Vec<usize>>,
    /// 1-based original index placed at each position of the consecutive
    /// form.
    pub consecutive_permutation: Vec<usize>,
    /// Whether the analysis had to permute the matrix into consecutive form.
    pub permuted: bool,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct SpectrumEntry {
    pub value: (f64, f64),
    pub multiplicity: usize,
    /// Orbit index and rotation exponent, absent for the zero eigenvalue.
    pub orbit: Option<usize>,
    pub k: Option<usize>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct OrbitSummary {
    pub index: usize,
    pub base: (f64, f64),
    pub chain_length: usize,
    /// Max verification residual over the right chains, per k.
    pub right_residuals: Vec<f64>,
    /// Max verification residual over the left chains, per k.
    pub left_residuals: Vec<f64>,
    pub residual_tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct MatrixPayload {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(f64, f64)>,
}

impl MatrixPayload {
    pub fn from_matrix(m: &crate::matrix::ComplexMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.entries().iter().map(|z| (z.re, z.im)).collect(),
        }
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ComponentSummary {
    pub orbit: usize,
    pub base: (f64, f64),
    pub matrix: MatrixPayload,
    /// Entrywise agreement between the similarity and block routes.
    pub route_equivalence: ResidualCheck,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct PerronSection {
    pub spectral_radius: f64,
    pub cyclic_index: usize,
    pub right: Vec<f64>,
    pub left: Vec<f64>,
    pub residual_tolerance: f64,
    pub peripheral: PeripheralReport,
    /// Smallest entry of the (rho-normalized) Perron component.
    pub component_min_entry: f64,
    pub component_min_tolerance: f64,
    /// Agreement of the Perron component with the similarity route.
    pub matches_similarity: ResidualCheck,
    pub pass: bool,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct AnalysisReport {
    pub schema: u32,
    pub input: InputDescriptor,
    pub tolerances: Tolerances,
    pub cyclic: CyclicSummary,
    pub spectrum: Vec<SpectrumEntry>,
    pub orbits: Vec<OrbitSummary>,
    pub components: Vec<ComponentSummary>,
    pub checks: Option<ComponentPropertyReport>,
    pub perron: Option<PerronSection>,
    pub warnings: Vec<String>,
    pub pass: bool,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable rendering of the report.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "input: {} ({}x{}, {})",
            self.input.path.as_deref().unwrap_or("<memory>"),
            self.input.rows,
            self.input.cols,
            self.input.format.as_deref().unwrap_or("unknown format"),
        );
        let _ = writeln!(
            out,
            "tolerances: zero {:.3e}, chain {:.3e} (relative), orbit {:.3e} (relative)",
            self.tolerances.zero_tol, self.tolerances.chain_tol, self.tolerances.orbit_tol
        );
        if self.cyclic.primitive {
            let _ = writeln!(out, "cyclic structure: primitive (h = 1); no h-cyclic structure for h >= 2");
        } else {
            let _ = writeln!(out, "cyclic structure: h = {}", self.cyclic.h);
            let classes: Vec<String> = self
                .cyclic
                .partition
                .iter()
                .map(|c| format!("{{{}}}", c.iter().map(usize::to_string).collect::<Vec<_>>().join(",")))
                .collect();
            let _ = writeln!(out, "partition: ({})", classes.join(", "));
            let _ = writeln!(
                out,
                "consecutive permutation: [{}]{}",
                self.cyclic
                    .consecutive_permutation
                    .iter()
                    .map(usize::to_string)
                    .collect::<Vec<_>>()
                    .join(", "),
                if self.cyclic.permuted { " (applied before decomposition)" } else { " (identity)" }
            );
        }
        let _ = writeln!(out, "spectrum ({} entries):", self.spectrum.len());
        for entry in &self.spectrum {
            let orbit_tag = match (entry.orbit, entry.k) {
                (Some(o), Some(k)) => format!("orbit {o}, k = {k}"),
                _ => "zero eigenvalue".to_string(),
            };
            let _ = writeln!(
                out,
                "  {:+.12} {:+.12}i  (multiplicity {}, {})",
                entry.value.0, entry.value.1, entry.multiplicity, orbit_tag
            );
        }
        for orbit in &self.orbits {
            let _ = writeln!(
                out,
                "orbit {}: base {:+.9}{:+.9}i, chain length {}, max chain residual {:.3e} (tol {:.3e}): {}",
                orbit.index,
                orbit.base.0,
                orbit.base.1,
                orbit.chain_length,
                orbit
                    .right_residuals
                    .iter()
                    .chain(&orbit.left_residuals)
                    .copied()
                    .fold(0.0_f64, f64::max),
                orbit.residual_tolerance,
                if orbit.pass { "ok" } else { "FAIL" }
            );
        }
        for component in &self.components {
            let _ = writeln!(
                out,
                "component for orbit {} (base {:+.9}{:+.9}i): route difference {:.3e} (tol {:.3e}): {}",
                component.orbit,
                component.base.0,
                component.base.1,
                component.route_equivalence.residual,
                component.route_equivalence.tolerance,
                if component.route_equivalence.pass { "ok" } else { "FAIL" }
            );
        }
        if let Some(checks) = &self.checks {
            let _ = writeln!(
                out,
                "reconstruction: residual {:.3e} (tol {:.3e}): {}",
                checks.reconstruction.residual,
                checks.reconstruction.tolerance,
                if checks.reconstruction.pass { "ok" } else { "FAIL" }
            );
            let worst_commutation = checks
                .commutation
                .iter()
                .map(|c| c.residual / c.tolerance.max(1e-300))
                .fold(0.0_f64, f64::max);
            let _ = writeln!(
                out,
                "commutation: {} components, worst residual/tolerance {:.3e}: {}",
                checks.commutation.len(),
                worst_commutation,
                if checks.commutation.iter().all(|c| c.pass) { "ok" } else { "FAIL" }
            );
            let _ = writeln!(
                out,
                "mutual annihilation: {} ordered pairs: {}",
                checks.annihilation.len(),
                if checks.annihilation.iter().all(|c| c.pass) { "ok" } else { "FAIL" }
            );
            let _ = writeln!(
                out,
                "digraph containment: {}",
                if checks.containment.iter().all(|c| c.pass) { "ok" } else { "FAIL" }
            );
            let applicable = checks.cyclic_index.iter().filter(|c| c.applicable).count();
            let _ = writeln!(
                out,
                "cyclic index of components: {applicable} applicable: {}",
                if checks.cyclic_index.iter().all(|c| c.pass) { "ok" } else { "FAIL" }
            );
        }
        if let Some(perron) = &self.perron {
            let _ = writeln!(
                out,
                "perron: rho = {:.12}, cyclic index {} (residual tol {:.3e})",
                perron.spectral_radius, perron.cyclic_index, perron.residual_tolerance
            );
            let _ = writeln!(
                out,
                "  peripheral residual {:.3e}, rotation residual {:.3e} (tol {:.3e}): {}",
                perron.peripheral.peripheral_residual,
                perron.peripheral.rotation_residual,
                perron.peripheral.tolerance,
                if perron.peripheral.pass { "ok" } else { "FAIL" }
            );
            let _ = writeln!(
                out,
                "  component min entry {:.3e} (>= -{:.3e}), similarity agreement {:.3e} (tol {:.3e}): {}",
                perron.component_min_entry,
                perron.component_min_tolerance,
                perron.matches_similarity.residual,
                perron.matches_similarity.tolerance,
                if perron.pass { "ok" } else { "FAIL" }
            );
        }
        for warning in &self.warnings {
            let _ = writeln!(out, "warning: {warning}");
        }
        let _ = writeln!(out, "overall: {}", if self.pass { "PASS" } else { "FAIL" });
        out
    }
}
