//! Quasi-static equilibrium solving with load stepping, and explicit
//! dynamics, over the assembled peridynamic force field.
//!
//! Statics uses Newton iteration on a finite-difference tangent for systems
//! up to `newton_dof_cap` degrees of freedom and adaptive dynamic relaxation
//! above that. Divergence of the scheme is recorded in the outcome, never a
//! crash: it is the operational signature of an unstable load step.

use crate::error::{Error, Result};
use crate::exec;
use crate::linalg::{self, Mat};
use crate::material::{Body, ModelFamily};
use crate::rng::SplitMix64;

/// Prescribed-displacement region: full-load target displacement per node,
/// applied on the masked components.
#[derive(Debug, Clone)]
pub struct DisplacementBc {
    pub nodes: Vec<usize>,
    pub targets: Vec<[f64; 3]>,
    pub mask: [bool; 3],
}

impl DisplacementBc {
    /// Clamp a node set to zero displacement on all components.
    pub fn fixed(nodes: Vec<usize>) -> Self {
        let targets = vec![[0.0; 3]; nodes.len()];
        DisplacementBc {
            nodes,
            targets,
            mask: [true; 3],
        }
    }
}

/// Static scheme selection. `Auto` uses Newton up to the dof cap and
/// dynamic relaxation above it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SchemeChoice {
    #[default]
    Auto,
    Newton,
    Adr,
}

#[derive(Debug, Clone)]
pub struct SolveSettings {
    /// Static iteration scheme.
    pub scheme: SchemeChoice,
    /// Convergence tolerance relative to the body's force-density scale.
    pub tol: f64,
    /// Newton iteration cap per load step.
    pub max_iter: usize,
    /// Residual growth factor that declares divergence.
    pub growth_factor: f64,
    /// Largest Newton system; bigger problems fall back to dynamic relaxation.
    pub newton_dof_cap: usize,
    /// Cap on the Newton update per iteration, in units of grid spacing.
    pub du_cap_rel: f64,
    /// Relative diagonal shift used when the tangent factorization hits a
    /// zero pivot (zero-energy directions).
    pub regularization: f64,
    /// Finite-difference step for the tangent, in units of grid spacing.
    pub fd_eps_rel: f64,
    /// Iteration cap for dynamic relaxation.
    pub adr_max_iter: usize,
}

impl Default for SolveSettings {
    fn default() -> Self {
        SolveSettings {
            scheme: SchemeChoice::Auto,
            tol: 1e-9,
            max_iter: 200,
            growth_factor: 1e3,
            newton_dof_cap: 2000,
            du_cap_rel: 0.5,
            regularization: 1e-8,
            fd_eps_rel: 1e-6,
            adr_max_iter: 20_000,
        }
    }
}

/// A boundary-value problem over a body.
#[derive(Debug, Clone)]
pub struct Problem {
    pub body: Body,
    pub bcs: Vec<DisplacementBc>,
    /// Body-force density rho0 * b per node at full load (ramped together
    /// with the displacement targets).
    pub body_force: Option<Vec<[f64; 3]>>,
    pub settings: SolveSettings,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Newton,
    Adr,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scheme::Newton => write!(f, "newton"),
            Scheme::Adr => write!(f, "adr"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DivergenceDiag {
    pub step: usize,
    pub iteration: usize,
    pub residual: f64,
    pub growth: f64,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub converged: bool,
    pub scheme: Scheme,
    pub positions: Vec<[f64; 3]>,
    /// Residual infinity-norm after each iteration, across all load steps.
    pub residual_history: Vec<f64>,
    pub iterations: usize,
    pub divergence: Option<DivergenceDiag>,
}

impl SolveOutcome {
    pub fn displacements(&self, body: &Body) -> Vec<[f64; 3]> {
        self.positions
            .iter()
            .zip(&body.nodes.positions)
            .map(|(x, x0)| [x[0] - x0[0], x[1] - x0[1], x[2] - x0[2]])
            .collect()
    }
}

/// Sets prescribed nodes to `ramp` times their target displacement; other
/// nodes untouched.
pub fn apply_bc(
    positions: &mut [[f64; 3]],
    reference: &[[f64; 3]],
    bc: &DisplacementBc,
    ramp: f64,
) -> Result<()> {
    if !(0.0..=1.0).contains(&ramp) {
        return Err(Error::ContractViolation(format!(
            "ramp fraction {ramp} outside [0, 1]"
        )));
    }
    for (&node, target) in bc.nodes.iter().zip(&bc.targets) {
        if node >= positions.len() {
            return Err(Error::Config(format!("unknown node id {node}")));
        }
        for c in 0..3 {
            if bc.mask[c] {
                positions[node][c] = reference[node][c] + ramp * target[c];
            }
        }
    }
    Ok(())
}

fn constrained_dofs(body: &Body, bcs: &[DisplacementBc]) -> Vec<bool> {
    let dim = body.dim();
    let mut fixed = vec![false; body.n_nodes() * dim];
    for bc in bcs {
        for &node in &bc.nodes {
            for c in 0..dim {
                if bc.mask[c] {
                    fixed[node * dim + c] = true;
                }
            }
        }
    }
    fixed
}

/// Residual (internal force plus ramped body force) on the free dofs.
fn residual(
    problem: &Problem,
    positions: &[[f64; 3]],
    ramp: f64,
    free: &[usize],
) -> Result<Vec<f64>> {
    let dim = problem.body.dim();
    let forces = problem.body.internal_forces(positions)?;
    Ok(free
        .iter()
        .map(|&dof| {
            let (n, c) = (dof / dim, dof % dim);
            let bf = problem
                .body_force
                .as_ref()
                .map(|b| b[n][c] * ramp)
                .unwrap_or(0.0);
            forces[n][c] + bf
        })
        .collect())
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Quasi-static solve with the boundary targets (and body force) ramped
/// linearly over `steps`.
pub fn solve_static(problem: &Problem, steps: usize) -> Result<SolveOutcome> {
    if steps == 0 {
        return Err(Error::Config("steps must be at least 1".into()));
    }
    let fixed = constrained_dofs(&problem.body, &problem.bcs);
    let free: Vec<usize> = (0..fixed.len()).filter(|&d| !fixed[d]).collect();
    let scheme = match problem.settings.scheme {
        SchemeChoice::Newton => Scheme::Newton,
        SchemeChoice::Adr => Scheme::Adr,
        SchemeChoice::Auto => {
            if free.len() <= problem.settings.newton_dof_cap {
                Scheme::Newton
            } else {
                Scheme::Adr
            }
        }
    };
    let reference = problem.body.nodes.positions.clone();
    let mut positions = reference.clone();

    let mut history = Vec::new();
    let mut iterations = 0;
    for step in 1..=steps {
        let ramp = step as f64 / steps as f64;
        for bc in &problem.bcs {
            apply_bc(&mut positions, &reference, bc, ramp)?;
        }
        let outcome = match scheme {
            Scheme::Newton => newton_step(problem, &mut positions, ramp, &free, step),
            Scheme::Adr => adr_step(problem, &mut positions, ramp, &free, step),
        };
        match outcome {
            Ok((mut hist, iters)) => {
                iterations += iters;
                history.append(&mut hist);
            }
            Err(diag) => {
                iterations += diag.iteration;
                return Ok(SolveOutcome {
                    converged: false,
                    scheme,
                    positions,
                    residual_history: history,
                    iterations,
                    divergence: Some(diag),
                });
            }
        }
    }
    Ok(SolveOutcome {
        converged: true,
        scheme,
        positions,
        residual_history: history,
        iterations,
        divergence: None,
    })
}

type StepResult = std::result::Result<(Vec<f64>, usize), DivergenceDiag>;

fn diverged(
    step: usize,
    iteration: usize,
    residual: f64,
    growth: f64,
    reason: String,
) -> DivergenceDiag {
    DivergenceDiag {
        step,
        iteration,
        residual,
        growth,
        reason,
    }
}

fn newton_step(
    problem: &Problem,
    positions: &mut Vec<[f64; 3]>,
    ramp: f64,
    free: &[usize],
    step: usize,
) -> StepResult {
    let dim = problem.body.dim();
    let dx = problem.body.nodes.dx;
    let s = &problem.settings;
    let tol_abs = s.tol * problem.body.force_scale();
    let eps = s.fd_eps_rel * dx;
    let mut history = Vec::new();

    let mut r = residual(problem, positions, ramp, free)
        .map_err(|e| diverged(step, 0, f64::NAN, 0.0, e.to_string()))?;
    let r0 = inf_norm(&r).max(tol_abs);
    for it in 0..s.max_iter {
        let r_norm = inf_norm(&r);
        history.push(r_norm);
        if !r_norm.is_finite() {
            return Err(diverged(step, it, r_norm, f64::INFINITY, "residual not finite".into()));
        }
        if r_norm <= tol_abs {
            // update iterations, not counting the initial residual check
            let iters = history.len() - 1;
            return Ok((history, iters));
        }
        if r_norm > s.growth_factor * r0 {
            return Err(diverged(
                step,
                it,
                r_norm,
                r_norm / r0,
                "residual growth exceeded divergence factor".into(),
            ));
        }

        // reduced finite-difference tangent over the free dofs
        let n = free.len();
        let cols: std::result::Result<Vec<Vec<f64>>, Error> = exec::try_map_indexed(n, |col| {
            let dof = free[col];
            let (node, c) = (dof / dim, dof % dim);
            let mut pos = positions.clone();
            pos[node][c] += eps;
            let fp = residual(problem, &pos, ramp, free)?;
            pos[node][c] = positions[node][c] - eps;
            let fm = residual(problem, &pos, ramp, free)?;
            Ok(fp
                .iter()
                .zip(fm.iter())
                .map(|(p, m)| (p - m) / (2.0 * eps))
                .collect())
        });
        let cols = cols.map_err(|e| diverged(step, it, r_norm, 0.0, e.to_string()))?;
        let mut jac = Mat::zeros(n, n);
        for (col, column) in cols.iter().enumerate() {
            for row in 0..n {
                jac.set(row, col, column[row]);
            }
        }
        let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        let (mut du, _regularized) = linalg::solve_regularized(&jac, &rhs, s.regularization)
            .map_err(|e| diverged(step, it, r_norm, 0.0, e.to_string()))?;

        // cap the update so a wild tangent cannot invert bonds outright
        let du_max = inf_norm(&du);
        let cap = s.du_cap_rel * dx;
        if du_max > cap {
            let f = cap / du_max;
            for v in du.iter_mut() {
                *v *= f;
            }
        }
        for (i, &dof) in free.iter().enumerate() {
            positions[dof / dim][dof % dim] += du[i];
        }
        r = residual(problem, positions, ramp, free)
            .map_err(|e| diverged(step, it + 1, f64::NAN, 0.0, e.to_string()))?;
    }
    let r_norm = inf_norm(&r);
    history.push(r_norm);
    if r_norm <= tol_abs {
        let iters = history.len() - 1;
        Ok((history, iters))
    } else {
        Err(diverged(
            step,
            problem.settings.max_iter,
            r_norm,
            r_norm / r0,
            "iteration cap exhausted".into(),
        ))
    }
}

/// Per-dof fictitious mass for dynamic relaxation: a uniform stiffness bound
/// scaled up where the current bond stretches push the tangent stiffness
/// beyond its small-strain value.
fn adr_masses(problem: &Problem, positions: &[[f64; 3]], free: &[usize], out: &mut [f64]) {
    let body = &problem.body;
    let dim = body.dim();
    let dx = body.nodes.dx;
    let modulus = body.material.law.modulus_scale();
    let base = 0.25 * 16.0 * modulus / (dx * dx);
    let m_exp = match body.material.family {
        crate::material::ModelFamily::Generalized(m) => m.0.abs().max(1.0),
        crate::material::ModelFamily::Silling => 1.0,
    };
    for (i, &dof) in free.iter().enumerate() {
        let node = dof / dim;
        let x0 = positions[node];
        let mut worst: f64 = 1.0;
        for b in body.families.family(node) {
            let j = b.neighbor as usize;
            let mut y2 = 0.0;
            for c in 0..dim {
                let d = positions[j][c] - x0[c];
                y2 += d * d;
            }
            worst = worst.max(y2 / (b.len * b.len));
        }
        // tangent stiffness of a stretched bond grows like ratio^(2m)
        out[i] = base * worst.powf(m_exp);
    }
}

/// Adaptive dynamic relaxation: damped pseudo-dynamics on a per-dof
/// fictitious mass, with the damping coefficient estimated from a Rayleigh
/// quotient of the local stiffness each iteration.
fn adr_step(
    problem: &Problem,
    positions: &mut Vec<[f64; 3]>,
    ramp: f64,
    free: &[usize],
    step: usize,
) -> StepResult {
    let dim = problem.body.dim();
    let s = &problem.settings;
    let tol_abs = s.tol * problem.body.force_scale();
    let n = free.len();
    let mut lambda = vec![0.0; n];
    adr_masses(problem, positions, free, &mut lambda);
    let mut history = Vec::new();

    let mut r = residual(problem, positions, ramp, free)
        .map_err(|e| diverged(step, 0, f64::NAN, 0.0, e.to_string()))?;
    let r0 = inf_norm(&r).max(tol_abs);
    let mut v_half = vec![0.0; n];
    let mut r_prev = r.clone();
    let mut iters = 0;
    for it in 0..s.adr_max_iter {
        iters = it;
        let r_norm = inf_norm(&r);
        if it % 100 == 0 || r_norm <= tol_abs {
            history.push(r_norm);
        }
        if !r_norm.is_finite() {
            return Err(diverged(step, it, r_norm, f64::INFINITY, "residual not finite".into()));
        }
        if r_norm <= tol_abs {
            return Ok((history, it));
        }
        if r_norm > s.growth_factor * r0 {
            return Err(diverged(
                step,
                it,
                r_norm,
                r_norm / r0,
                "residual growth exceeded divergence factor".into(),
            ));
        }
        if it % 16 == 0 {
            adr_masses(problem, positions, free, &mut lambda);
        }
        if it == 0 {
            for i in 0..n {
                v_half[i] = 0.5 * r[i] / lambda[i];
            }
        } else {
            // local stiffness Rayleigh estimate for the damping coefficient
            let mut num = 0.0;
            let mut den = 0.0;
            for i in 0..n {
                let dof = free[i];
                let u = positions[dof / dim][dof % dim]
                    - problem.body.nodes.positions[dof / dim][dof % dim];
                if v_half[i].abs() > 1e-300 {
                    let k_local = -(r[i] - r_prev[i]) / v_half[i];
                    num += u * u * k_local;
                }
                den += u * u * lambda[i];
            }
            let c = if den > 0.0 && num > 0.0 {
                (2.0 * (num / den).sqrt()).min(1.9)
            } else {
                0.0
            };
            for i in 0..n {
                v_half[i] = ((2.0 - c) * v_half[i] + 2.0 * r[i] / lambda[i]) / (2.0 + c);
            }
        }
        // velocity clamp: one pseudo-step never moves a node more than half
        // a spacing, so stiff transients cannot outrun the mass estimate
        let v_cap = 0.5 * problem.body.nodes.dx;
        let v_max = inf_norm(&v_half);
        if v_max > v_cap {
            let f = v_cap / v_max;
            for v in v_half.iter_mut() {
                *v *= f;
            }
        }
        for (i, &dof) in free.iter().enumerate() {
            positions[dof / dim][dof % dim] += v_half[i];
        }
        r_prev = r;
        r = residual(problem, positions, ramp, free)
            .map_err(|e| diverged(step, it + 1, f64::NAN, 0.0, e.to_string()))?;
    }
    let r_norm = inf_norm(&r);
    if r_norm <= tol_abs {
        Ok((history, iters))
    } else {
        Err(diverged(
            step,
            s.adr_max_iter,
            r_norm,
            r_norm / r0,
            "relaxation iteration cap exhausted".into(),
        ))
    }
}

/// Stable explicit time step: safety * dX * sqrt(rho0 / C) with C the
/// largest elastic modulus.
pub fn stable_dt(body: &Body, safety: f64) -> f64 {
    safety * body.nodes.dx * (body.material.rho0 / body.material.law.modulus_scale()).sqrt()
}

#[derive(Debug, Clone)]
pub struct DynSettings {
    pub dt: f64,
    pub n_steps: usize,
    /// Snapshot/energy/reaction sampling period in steps.
    pub sample_every: usize,
    /// Steps over which prescribed displacements ramp from 0 to full.
    pub ramp_steps: usize,
    /// Optional deterministic velocity noise (seed, amplitude, component
    /// mask) applied to free nodes at t = 0 to seed instability growth.
    pub seed_velocity: Option<(u64, f64, [bool; 3])>,
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub step: usize,
    pub time: f64,
    pub positions: Vec<[f64; 3]>,
    pub velocities: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, Copy)]
pub struct EnergySample {
    pub step: usize,
    pub time: f64,
    pub kinetic: f64,
    pub strain: Option<f64>,
    pub total: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
    pub energy: Vec<EnergySample>,
    /// Net internal force (times volume) summed over constrained nodes with
    /// x-coordinate below the domain midpoint, one sample per period; a
    /// reaction-force history for prescribed-end experiments.
    pub reactions: Vec<(f64, [f64; 3])>,
    pub aborted: Option<(usize, String)>,
}

/// Velocity-Verlet explicit dynamics with prescribed-displacement regions.
/// NaN forces abort the run with the offending step recorded.
pub fn solve_dynamic(problem: &Problem, dyn_settings: &DynSettings) -> Result<Trajectory> {
    let body = &problem.body;
    let dim = body.dim();
    let n = body.n_nodes();
    let dt = dyn_settings.dt;
    if !(dt > 0.0) {
        return Err(Error::Config("dt must be positive".into()));
    }
    let cap = stable_dt(body, 1.0);
    if dt > cap {
        return Err(Error::Config(format!(
            "dt {dt} above explicit stability cap {cap}"
        )));
    }
    if dyn_settings.sample_every == 0 {
        return Err(Error::Config("sample_every must be at least 1".into()));
    }
    let fixed = constrained_dofs(body, &problem.bcs);
    let reference = body.nodes.positions.clone();
    let mut positions = reference.clone();
    let mut velocities = vec![[0.0; 3]; n];
    if let Some((seed, amp, mask)) = dyn_settings.seed_velocity {
        let mut rng = SplitMix64::new(seed);
        for i in 0..n {
            for c in 0..dim {
                let noise = amp * rng.next_signed();
                if mask[c] && !fixed[i * dim + c] {
                    velocities[i][c] = noise;
                }
            }
        }
    }

    let rho0 = body.material.rho0;
    let mid_x = {
        let xs: Vec<f64> = reference.iter().map(|x| x[0]).collect();
        0.5 * (xs.iter().cloned().fold(f64::INFINITY, f64::min)
            + xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
    };
    let accel = |forces: &[[f64; 3]], i: usize, c: usize, ramp: f64| -> f64 {
        let bf = problem
            .body_force
            .as_ref()
            .map(|b| b[i][c] * ramp)
            .unwrap_or(0.0);
        (forces[i][c] + bf) / rho0
    };
    let ramp_at = |step: usize| -> f64 {
        if dyn_settings.ramp_steps == 0 {
            1.0
        } else {
            (step as f64 / dyn_settings.ramp_steps as f64).min(1.0)
        }
    };

    let mut trajectory = Trajectory {
        snapshots: Vec::new(),
        energy: Vec::new(),
        reactions: Vec::new(),
        aborted: None,
    };
    let mut forces = body.internal_forces(&positions)?;

    let record = |step: usize,
                  positions: &Vec<[f64; 3]>,
                  velocities: &Vec<[f64; 3]>,
                  forces: &Vec<[f64; 3]>,
                  trajectory: &mut Trajectory|
     -> Result<()> {
        let time = step as f64 * dt;
        let kinetic: f64 = (0..n)
            .map(|i| {
                0.5 * rho0
                    * body.nodes.volumes[i]
                    * (0..dim)
                        .map(|c| velocities[i][c] * velocities[i][c])
                        .sum::<f64>()
            })
            .sum();
        let strain = match body.material.family {
            ModelFamily::Generalized(_) => Some(body.strain_energy(positions)?),
            ModelFamily::Silling => None,
        };
        trajectory.energy.push(EnergySample {
            step,
            time,
            kinetic,
            strain,
            total: strain.map(|s| s + kinetic),
        });
        let mut reaction = [0.0; 3];
        for i in 0..n {
            let is_fixed = (0..dim).any(|c| fixed[i * dim + c]);
            if is_fixed && reference[i][0] < mid_x {
                for c in 0..dim {
                    reaction[c] += forces[i][c] * body.nodes.volumes[i];
                }
            }
        }
        trajectory.reactions.push((time, reaction));
        trajectory.snapshots.push(Snapshot {
            step,
            time,
            positions: positions.clone(),
            velocities: velocities.clone(),
        });
        Ok(())
    };
    record(0, &positions, &velocities, &forces, &mut trajectory)?;

    for step in 1..=dyn_settings.n_steps {
        let ramp_prev = ramp_at(step - 1);
        let ramp = ramp_at(step);
        for i in 0..n {
            for c in 0..dim {
                if fixed[i * dim + c] {
                    continue;
                }
                velocities[i][c] += 0.5 * dt * accel(&forces, i, c, ramp_prev);
                positions[i][c] += dt * velocities[i][c];
            }
        }
        for bc in &problem.bcs {
            apply_bc(&mut positions, &reference, bc, ramp)?;
        }
        for i in 0..n {
            for c in 0..dim {
                if fixed[i * dim + c] {
                    velocities[i][c] = 0.0;
                }
            }
        }
        forces = match body.internal_forces(&positions) {
            Ok(f) => f,
            Err(e) => {
                trajectory.aborted = Some((step, e.to_string()));
                return Ok(trajectory);
            }
        };
        if forces
            .iter()
            .any(|f| f.iter().take(dim).any(|v| !v.is_finite()))
        {
            trajectory.aborted = Some((step, "non-finite force".into()));
            return Ok(trajectory);
        }
        for i in 0..n {
            for c in 0..dim {
                if !fixed[i * dim + c] {
                    velocities[i][c] += 0.5 * dt * accel(&forces, i, c, ramp);
                }
            }
        }
        if step % dyn_settings.sample_every == 0 || step == dyn_settings.n_steps {
            record(step, &positions, &velocities, &forces, &mut trajectory)?;
        }
    }
    Ok(trajectory)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::SethHill;
    use crate::material::{LocalLaw, MaterialSpec};
    use crate::mesh::{boundary_region, build_families, build_grid, GridSpec, InfluenceSpec, Side};

    fn bar_body(n_nodes: usize, m: f64) -> Body {
        let dx = 1.0 / n_nodes as f64;
        let nodes = build_grid(&GridSpec {
            dim: 1,
            extents: [1.0, 0.0, 0.0],
            dx,
            cross_section: 1.0,
        })
        .unwrap();
        let fams = build_families(&nodes, &InfluenceSpec::step(3.0 * dx)).unwrap();
        Body::new(
            nodes,
            fams,
            MaterialSpec {
                family: ModelFamily::Generalized(SethHill(m)),
                law: LocalLaw::HydrostaticLinear { kappa: 1.0 },
                rho0: 1.0,
            },
        )
        .unwrap()
    }

    fn bar_problem(n_nodes: usize, m: f64, target_strain: f64, bc_layers: usize) -> Problem {
        let body = bar_body(n_nodes, m);
        let left = boundary_region(&body.nodes, 0, Side::Negative, bc_layers).unwrap();
        let right = boundary_region(&body.nodes, 0, Side::Positive, bc_layers).unwrap();
        let mk = |ids: Vec<usize>| {
            let targets = ids
                .iter()
                .map(|&i| [target_strain * body.nodes.positions[i][0], 0.0, 0.0])
                .collect();
            DisplacementBc {
                nodes: ids,
                targets,
                mask: [true, false, false],
            }
        };
        Problem {
            bcs: vec![mk(left), mk(right)],
            body,
            body_force: None,
            settings: SolveSettings::default(),
        }
    }

    #[test]
    fn apply_bc_ramps_linearly() {
        let problem = bar_problem(20, 1.0, 0.4, 3);
        let reference = problem.body.nodes.positions.clone();
        let mut pos = reference.clone();
        apply_bc(&mut pos, &reference, &problem.bcs[1], 0.0).unwrap();
        assert_eq!(pos, reference);
        apply_bc(&mut pos, &reference, &problem.bcs[1], 1.0).unwrap();
        let id = *problem.bcs[1].nodes.last().unwrap();
        assert!((pos[id][0] - 1.4 * reference[id][0]).abs() < 1e-15);
        apply_bc(&mut pos, &reference, &problem.bcs[1], 0.5).unwrap();
        assert!((pos[id][0] - 1.2 * reference[id][0]).abs() < 1e-15);
        assert!(apply_bc(&mut pos, &reference, &problem.bcs[1], 1.5).is_err());
    }

    #[test]
    fn apply_bc_rejects_unknown_node() {
        let bc = DisplacementBc::fixed(vec![999]);
        let reference = vec![[0.0; 3]; 10];
        let mut pos = reference.clone();
        assert!(apply_bc(&mut pos, &reference, &bc, 1.0).is_err());
    }

    #[test]
    fn zero_target_converges_immediately() {
        let problem = bar_problem(20, 1.0, 0.0, 3);
        let out = solve_static(&problem, 1).unwrap();
        assert!(out.converged);
        assert_eq!(out.iterations, 0); // no update iterations needed
        for (x, x0) in out.positions.iter().zip(&problem.body.nodes.positions) {
            assert_eq!(x, x0);
        }
    }

    #[test]
    fn large_tension_in_one_step_converges_to_uniform_strain() {
        let problem = bar_problem(60, 1.0, 1.0, 6);
        let out = solve_static(&problem, 1).unwrap();
        assert!(out.converged, "divergence: {:?}", out.divergence);
        assert_eq!(out.scheme, Scheme::Newton);
        // interior nonlocal strain settles at the Green-Lagrange value of
        // the applied stretch
        let states = problem.body.nodal_states(&out.positions).unwrap();
        let expect = ((1.0f64 + 1.0).powi(2) - 1.0) / 2.0;
        for i in 12..48 {
            let e = states[i].strain.get(0, 0);
            assert!(
                (e - expect).abs() < 1e-8 * expect,
                "node {i}: strain {e} vs {expect}"
            );
        }
    }

    #[test]
    fn interior_force_vanishes_at_converged_homogeneous_state() {
        let problem = bar_problem(40, 1.0, 0.3, 6);
        let out = solve_static(&problem, 1).unwrap();
        assert!(out.converged);
        let forces = problem.body.internal_forces(&out.positions).unwrap();
        let scale = problem.body.force_scale();
        for f in forces.iter().take(30).skip(10) {
            assert!(f[0].abs() < 1e-9 * scale);
        }
    }

    #[test]
    fn adr_agrees_with_newton_on_stable_tension() {
        let mut problem = bar_problem(40, 1.0, 0.2, 6);
        let newton = solve_static(&problem, 1).unwrap();
        assert!(newton.converged);
        problem.settings.scheme = SchemeChoice::Adr;
        let adr = solve_static(&problem, 1).unwrap();
        assert!(adr.converged, "ADR divergence: {:?}", adr.divergence);
        assert_eq!(adr.scheme, Scheme::Adr);
        for (a, b) in newton.positions.iter().zip(&adr.positions) {
            assert!((a[0] - b[0]).abs() < 1e-6, "{} vs {}", a[0], b[0]);
        }
    }

    #[test]
    fn dynamics_zero_load_stays_at_rest() {
        let problem = bar_problem(20, 1.0, 0.0, 3);
        let dt = stable_dt(&problem.body, 0.5);
        let traj = solve_dynamic(
            &problem,
            &DynSettings {
                dt,
                n_steps: 50,
                sample_every: 10,
                ramp_steps: 0,
                seed_velocity: None,
            },
        )
        .unwrap();
        assert!(traj.aborted.is_none());
        let last = traj.snapshots.last().unwrap();
        // reference coordinates are not exactly representable, so forces at
        // rest are round-off rather than bitwise zero
        for (x, x0) in last.positions.iter().zip(&problem.body.nodes.positions) {
            assert!((x[0] - x0[0]).abs() < 1e-13);
        }
    }

    #[test]
    fn dynamics_conserves_energy_for_stable_free_vibration() {
        // free bar, m = 1, small seeded velocity field; dt at a tenth of the
        // stability cap; total energy drift stays inside 1% over 1e4 steps
        let problem = Problem {
            body: bar_body(40, 1.0),
            bcs: vec![],
            body_force: None,
            settings: SolveSettings::default(),
        };
        let dt = stable_dt(&problem.body, 0.1);
        let mut traj = solve_dynamic(
            &problem,
            &DynSettings {
                dt,
                n_steps: 10_000,
                sample_every: 500,
                ramp_steps: 0,
                seed_velocity: Some((7, 1e-3, [true, false, false])),
            },
        )
        .unwrap();
        assert!(traj.aborted.is_none());
        traj.energy.remove(0);
        let totals: Vec<f64> = traj.energy.iter().map(|e| e.total.unwrap()).collect();
        let e_ref = totals[0];
        assert!(e_ref > 0.0);
        for t in &totals {
            assert!(
                (t - e_ref).abs() < 0.01 * e_ref,
                "energy drift: {t} vs {e_ref}"
            );
        }
    }

    #[test]
    fn dynamics_rejects_unstable_dt() {
        let problem = bar_problem(20, 1.0, 0.0, 3);
        let dt = stable_dt(&problem.body, 2.0);
        assert!(solve_dynamic(
            &problem,
            &DynSettings {
                dt,
                n_steps: 1,
                sample_every: 1,
                ramp_steps: 0,
                seed_velocity: None,
            },
        )
        .is_err());
    }

    #[test]
    fn dynamics_trajectories_are_deterministic() {
        let problem = bar_problem(20, 1.0, 0.1, 3);
        let dt = stable_dt(&problem.body, 0.5);
        let settings = DynSettings {
            dt,
            n_steps: 200,
            sample_every: 50,
            ramp_steps: 20,
            seed_velocity: Some((3, 1e-4, [true, false, false])),
        };
        let t1 = solve_dynamic(&problem, &settings).unwrap();
        let t2 = solve_dynamic(&problem, &settings).unwrap();
        for (a, b) in t1.snapshots.iter().zip(&t2.snapshots) {
            assert_eq!(a.positions, b.positions);
            assert_eq!(a.velocities, b.velocities);
        }
    }
}
