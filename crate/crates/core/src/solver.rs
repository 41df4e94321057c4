//! Numerical radial Schrödinger eigensolver.
//!
//! Solves `(-Δ + v f(r)) ψ = E ψ` for the reduced radial function
//! `u(r) = r ψ(r)`, i.e. `-u'' + [ℓ(ℓ+1)/r² + v f(r)] u = E u`, with
//! fixed-step Numerov on a composite mesh: uniform in `x = ln r` from
//! `r_min` to the junction (where the substitution `u = √r w` turns the
//! equation into `w'' = [(ℓ+½)² + r²(v f - E)] w`, taming the Coulomb
//! singularity), and uniform in `r` beyond it. Outward integration starts
//! from the regular series `u ~ r^{ℓ+1}(1 + c r/(2ℓ+2))`, inward from
//! exponential decay; the two are matched by a normalized Wronskian
//! defect at the outermost classical turning point. The eigenvalue search
//! brackets the requested node count by bisection and then drives the
//! matching defect to zero with bisection plus secant refinement.

use crate::error::{Error, Result};
use crate::kinetic::{SpectralCurve, StateLabel};
use crate::models::{eval_shape, PotentialShape};
use crate::search;

/// Integration controls. The defaults adapt the step sizes and the outer
/// radius to the problem; the caps are safety rails.
#[derive(Debug, Clone)]
pub struct GridControls {
    pub r_min: f64,
    pub r_join: f64,
    /// cap on the log-region step in x = ln r
    pub dx_log_cap: f64,
    /// cap on the linear-region step in r
    pub dr_lin_cap: f64,
    /// starting outer radius; 0 = choose from an envelope energy estimate
    pub r_max_initial: f64,
    pub r_max_cap: f64,
    /// accept r_max once doubling it moves E by less than this (relative)
    pub e_change_tol: f64,
}

impl Default for GridControls {
    fn default() -> Self {
        GridControls {
            r_min: 1e-6,
            r_join: 1.0,
            dx_log_cap: 4e-3,
            dr_lin_cap: 2e-2,
            r_max_initial: 0.0,
            r_max_cap: 2e5,
            e_change_tol: 1e-8,
        }
    }
}

/// One eigenproblem: shape, coupling, state labels, integration controls.
#[derive(Debug, Clone)]
pub struct RadialProblem {
    pub shape: PotentialShape,
    pub v: f64,
    pub n: u32,
    pub ell: u32,
    pub grid: GridControls,
}

impl RadialProblem {
    pub fn new(shape: PotentialShape, v: f64, n: u32, ell: u32) -> Self {
        RadialProblem {
            shape,
            v,
            n,
            ell,
            grid: GridControls::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct MeshStats {
    pub r_min: f64,
    pub r_join: f64,
    pub r_max: f64,
    pub n_log: usize,
    pub n_lin: usize,
    pub r_max_doublings: usize,
}

/// Solved bound state.
#[derive(Debug, Clone, serde::Serialize)]
pub struct EigenSolution {
    pub energy: f64,
    pub nodes: usize,
    /// 1 + Richardson error estimate of the norm quadrature
    pub norm_check: f64,
    /// ⟨ψ| f |ψ⟩ — the Hellmann–Feynman derivative F'(v)
    pub expectation_f: f64,
    pub converged: bool,
    /// final normalized matching defect
    pub residual: f64,
    pub mesh: MeshStats,
}

// ---------------------------------------------------------------------------
// Mesh

struct Mesh {
    // log segment: x uniform on [ln r_min, ln r_join], n_log >= 8 points
    dx: f64,
    n_log: usize,
    r_log: Vec<f64>,
    f_log: Vec<f64>,
    // linear segment: r uniform on [r_join, r_max]; node 0 == log end
    dr: f64,
    n_lin: usize,
    r_lin: Vec<f64>,
    f_lin: Vec<f64>,
    ell: f64,
    v: f64,
    r_max: f64,
}

impl Mesh {
    fn total(&self) -> usize {
        if self.n_lin == 0 {
            self.n_log
        } else {
            self.n_log + self.n_lin - 1
        }
    }

    fn junction(&self) -> usize {
        self.n_log - 1
    }

    /// w'' = g w coefficient on the log segment.
    fn g_log(&self, i: usize, e: f64) -> f64 {
        let r = self.r_log[i];
        let lh = self.ell + 0.5;
        lh * lh + r * r * (self.v * self.f_log[i] - e)
    }

    /// u'' = w u coefficient on the linear segment.
    fn w_lin(&self, j: usize, e: f64) -> f64 {
        let r = self.r_lin[j];
        self.ell * (self.ell + 1.0) / (r * r) + self.v * self.f_lin[j] - e
    }

    /// Effective potential at a global node.
    fn veff(&self, idx: usize, _e: f64) -> f64 {
        if idx < self.n_log {
            let r = self.r_log[idx];
            self.ell * (self.ell + 1.0) / (r * r) + self.v * self.f_log[idx]
        } else {
            let j = idx - self.junction();
            let r = self.r_lin[j];
            self.ell * (self.ell + 1.0) / (r * r) + self.v * self.f_lin[j]
        }
    }

}

/// Step sizes frozen across outer-radius doublings, so that successive
/// meshes share every interior node and energy differences measure the
/// truncation by `r_max` alone.
#[derive(Debug, Clone, Copy)]
struct MeshSpacing {
    dx: f64,
    dr: f64,
}

fn build_mesh(
    shape: &PotentialShape,
    v: f64,
    ell: u32,
    e_deep: f64,
    r_max: f64,
    ctl: &GridControls,
    reuse: Option<MeshSpacing>,
) -> Result<Mesh> {
    let ellf = ell as f64;
    let (r_join, pure_log) = if r_max <= 2.0 * ctl.r_join {
        (r_max, true)
    } else {
        (ctl.r_join, false)
    };

    // Log-region step from the largest |G| the sweeps will see.
    let dx = match reuse {
        Some(s) if !pure_log => s.dx,
        _ => {
            let mut g_max: f64 = 1.0;
            for i in 0..64 {
                let r = ctl.r_min * (r_join / ctl.r_min).powf(i as f64 / 63.0);
                let f = eval_shape(shape, r)?;
                let lh = ellf + 0.5;
                g_max = g_max.max((lh * lh + r * r * (v * f - e_deep)).abs());
            }
            ctl.dx_log_cap.min(0.35 / g_max.sqrt())
        }
    };
    let span_x = (r_join / ctl.r_min).ln();
    let n_log = ((span_x / dx).ceil() as usize + 1).max(12);
    let dx = span_x / (n_log - 1) as f64;
    let x0 = ctl.r_min.ln();
    let mut r_log = Vec::with_capacity(n_log);
    let mut f_log = Vec::with_capacity(n_log);
    for i in 0..n_log {
        let r = (x0 + i as f64 * dx).exp();
        r_log.push(r);
        f_log.push(eval_shape(shape, r)?);
    }

    let (dr, n_lin, r_lin, f_lin) = if pure_log {
        (0.0, 0usize, Vec::new(), Vec::new())
    } else {
        let w_abs = |r: f64| -> Result<f64> {
            let f = eval_shape(shape, r)?;
            Ok((ellf * (ellf + 1.0) / (r * r) + v * f - e_deep).abs())
        };
        let dr = match reuse {
            // keep the spacing unless Numerov stability at the far edge
            // would be compromised (h²|W|/12 must stay well below 1)
            Some(s) if s.dr > 0.0 && s.dr * s.dr * w_abs(r_max)? / 12.0 < 0.4 => s.dr,
            _ => {
                let mut w_max: f64 = 1.0;
                for i in 0..64 {
                    let r = r_join + (r_max - r_join) * i as f64 / 63.0;
                    w_max = w_max.max(w_abs(r)?);
                }
                ctl.dr_lin_cap.min(0.35 / w_max.sqrt())
            }
        };
        let n_lin = (((r_max - r_join) / dr).ceil() as usize + 1).max(12);
        if n_lin > 2_000_000 {
            return Err(Error::NumericalInstability(format!(
                "linear mesh would need {n_lin} points (r_max={r_max}, dr={dr})"
            )));
        }
        // The domain is rounded up to a whole number of steps instead of
        // rescaling dr, so meshes with a shared spacing share every node
        // and outer-radius doublings compare identical discretizations.
        let mut r_lin = Vec::with_capacity(n_lin);
        let mut f_lin = Vec::with_capacity(n_lin);
        for j in 0..n_lin {
            let r = r_join + j as f64 * dr;
            r_lin.push(r);
            f_lin.push(eval_shape(shape, r)?);
        }
        (dr, n_lin, r_lin, f_lin)
    };

    let r_end = if n_lin == 0 {
        r_max
    } else {
        r_lin[n_lin - 1]
    };
    Ok(Mesh {
        dx,
        n_log,
        r_log,
        f_log,
        dr,
        n_lin,
        r_lin,
        f_lin,
        ell: ellf,
        v,
        r_max: r_end,
    })
}

// ---------------------------------------------------------------------------
// Numerov sweeps

const RENORM_THRESHOLD: f64 = 1e140;

/// Numerov step for y'' = g y:
/// y_{i+1} = [2(1 + 5h²g_i/12) y_i - (1 - h²g_{i-1}/12) y_{i-1}] / (1 - h²g_{i+1}/12)
#[inline]
fn numerov_next(h2: f64, g_prev: f64, g_cur: f64, g_next: f64, y_prev: f64, y_cur: f64) -> f64 {
    let b = 2.0 * (1.0 + 5.0 * h2 * g_cur / 12.0) * y_cur;
    let c = (1.0 - h2 * g_prev / 12.0) * y_prev;
    (b - c) / (1.0 - h2 * g_next / 12.0)
}

fn count_step(prev: f64, cur: f64, nodes: &mut usize) {
    if prev != 0.0 && cur != 0.0 && prev.signum() != cur.signum() {
        *nodes += 1;
    }
}

/// Outward integration result, stored in mesh coordinates. `w` covers log
/// nodes `0..w_len`, `u` covers linear nodes `0..u_len`.
struct Outward {
    w: Vec<f64>,
    u: Vec<f64>,
    nodes: usize,
}

/// Inward integration result; arrays are full-length with only the tail
/// region (down to the requested node) filled.
struct Inward {
    w: Vec<f64>,
    u: Vec<f64>,
    w_from: usize,
}

fn renormalize(bufs: &mut [&mut Vec<f64>], scale: f64) {
    for buf in bufs.iter_mut() {
        for y in buf.iter_mut() {
            *y *= scale;
        }
    }
}

/// Integrate outward from `r_min` up to global node `upto` (inclusive).
fn sweep_out(mesh: &Mesh, e: f64, upto: usize) -> Result<Outward> {
    let j0 = mesh.junction();
    let dx = mesh.dx;
    let h2x = dx * dx;
    let log_upto = upto.min(j0);
    let mut w: Vec<f64> = Vec::with_capacity(log_upto + 3);
    let mut u: Vec<f64> = Vec::new();
    let mut nodes = 0usize;

    // Regular series u ~ r^{ℓ+1}(1 + c r/(2ℓ+2)), c = lim r·v f(r);
    // w = u / sqrt(r). Scale out r0^{ℓ+1} to stay in range.
    let c_coul = mesh.v * mesh.r_log[0] * mesh.f_log[0];
    let series = |i: usize| -> f64 {
        let r = mesh.r_log[i];
        let rel = r / mesh.r_log[0];
        rel.powf(mesh.ell + 1.0) * (1.0 + c_coul * r / (2.0 * mesh.ell + 2.0)) / r.sqrt()
    };
    w.push(series(0));
    if log_upto >= 1 {
        w.push(series(1));
    }
    for i in 1..log_upto {
        let y = numerov_next(
            h2x,
            mesh.g_log(i - 1, e),
            mesh.g_log(i, e),
            mesh.g_log(i + 1, e),
            w[i - 1],
            w[i],
        );
        if !y.is_finite() {
            return Err(Error::NumericalInstability(format!(
                "outward log sweep diverged at r={}",
                mesh.r_log[i + 1]
            )));
        }
        count_step(w[i], y, &mut nodes);
        w.push(y);
        if y.abs() > RENORM_THRESHOLD {
            let s = 1.0 / y.abs();
            renormalize(&mut [&mut w], s);
        }
    }

    if upto > j0 && mesh.n_lin > 0 {
        // Convert (w, w') -> (u, u') at the junction, O(dx^4) one-sided.
        let m = w.len();
        if m < 5 {
            return Err(Error::NumericalInstability("log mesh too short".into()));
        }
        let wp = (25.0 * w[m - 1] - 48.0 * w[m - 2] + 36.0 * w[m - 3] - 16.0 * w[m - 4]
            + 3.0 * w[m - 5])
            / (12.0 * dx);
        let rj = mesh.r_log[j0];
        let uj = rj.sqrt() * w[m - 1];
        let upj = (wp + 0.5 * w[m - 1]) / rj.sqrt();

        // Fifth-order Taylor start into the linear region.
        let dr = mesh.dr;
        let (w0, w1, w2) = (mesh.w_lin(0, e), mesh.w_lin(1, e), mesh.w_lin(2, e));
        let wp0 = (-3.0 * w0 + 4.0 * w1 - w2) / (2.0 * dr);
        let wpp0 = (w0 - 2.0 * w1 + w2) / (dr * dr);
        let u3 = wp0 * uj + w0 * upj;
        let u4 = wpp0 * uj + 2.0 * wp0 * upj + w0 * w0 * uj;
        let u_next = uj
            + dr * upj
            + dr * dr / 2.0 * w0 * uj
            + dr * dr * dr / 6.0 * u3
            + dr * dr * dr * dr / 24.0 * u4;

        u.push(uj);
        u.push(u_next);
        count_step(uj, u_next, &mut nodes);
        let lin_upto = (upto - j0).min(mesh.n_lin - 1);
        let h2r = dr * dr;
        for j in 1..lin_upto {
            let y = numerov_next(
                h2r,
                mesh.w_lin(j - 1, e),
                mesh.w_lin(j, e),
                mesh.w_lin(j + 1, e),
                u[j - 1],
                u[j],
            );
            if !y.is_finite() {
                return Err(Error::NumericalInstability(format!(
                    "outward linear sweep diverged at r={}",
                    mesh.r_lin[j + 1]
                )));
            }
            count_step(u[j], y, &mut nodes);
            u.push(y);
            if y.abs() > RENORM_THRESHOLD {
                let s = 1.0 / y.abs();
                renormalize(&mut [&mut w, &mut u], s);
            }
        }
    }

    Ok(Outward { w, u, nodes })
}

/// Integrate inward from `r_max` down to global node `downto` (inclusive).
fn sweep_in(mesh: &Mesh, e: f64, downto: usize) -> Result<Inward> {
    let j0 = mesh.junction();
    let mut w = vec![0.0; mesh.n_log];
    let mut u = vec![0.0; mesh.n_lin];

    if mesh.n_lin > 0 {
        let n = mesh.n_lin;
        let dr = mesh.dr;
        let h2r = dr * dr;
        let kap_end = mesh.w_lin(n - 1, e).max(1e-12).sqrt();
        let kap_prev = mesh.w_lin(n - 2, e).max(1e-12).sqrt();
        let kbar = 0.5 * (kap_end + kap_prev);
        u[n - 1] = 1.0;
        u[n - 2] = (kbar * dr).exp();
        let lin_downto = downto.saturating_sub(j0).min(n - 2);
        let mut j = n - 2;
        while j > lin_downto {
            let y = numerov_next(
                h2r,
                mesh.w_lin(j + 1, e),
                mesh.w_lin(j, e),
                mesh.w_lin(j - 1, e),
                u[j + 1],
                u[j],
            );
            if !y.is_finite() {
                return Err(Error::NumericalInstability(format!(
                    "inward sweep diverged at r={}",
                    mesh.r_lin[j - 1]
                )));
            }
            u[j - 1] = y;
            if y.abs() > RENORM_THRESHOLD {
                let s = 1.0 / y.abs();
                renormalize(&mut [&mut w, &mut u], s);
            }
            j -= 1;
        }
        if downto < j0 {
            // Cross the junction: (u, u') -> (w, w'), then Taylor down in x.
            let up0 =
                (-25.0 * u[0] + 48.0 * u[1] - 36.0 * u[2] + 16.0 * u[3] - 3.0 * u[4]) / (12.0 * dr);
            let rj = mesh.r_lin[0];
            let wj = u[0] / rj.sqrt();
            let wpj = up0 * rj.sqrt() - 0.5 * wj;
            let dx = mesh.dx;
            let gn = mesh.g_log(j0, e);
            let gn1 = mesh.g_log(j0 - 1, e);
            let gn2 = mesh.g_log(j0 - 2, e);
            let gp = (3.0 * gn - 4.0 * gn1 + gn2) / (2.0 * dx);
            let gpp = (gn - 2.0 * gn1 + gn2) / (dx * dx);
            let w3 = gp * wj + gn * wpj;
            let w4 = gpp * wj + 2.0 * gp * wpj + gn * gn * wj;
            let w_prev = wj - dx * wpj + dx * dx / 2.0 * gn * wj - dx * dx * dx / 6.0 * w3
                + dx * dx * dx * dx / 24.0 * w4;
            w[j0] = wj;
            w[j0 - 1] = w_prev;
            let h2x = dx * dx;
            let mut i = j0 - 1;
            while i > downto {
                let y = numerov_next(
                    h2x,
                    mesh.g_log(i + 1, e),
                    mesh.g_log(i, e),
                    mesh.g_log(i - 1, e),
                    w[i + 1],
                    w[i],
                );
                if !y.is_finite() {
                    return Err(Error::NumericalInstability(format!(
                        "inward log sweep diverged at r={}",
                        mesh.r_log[i - 1]
                    )));
                }
                w[i - 1] = y;
                if y.abs() > RENORM_THRESHOLD {
                    let s = 1.0 / y.abs();
                    renormalize(&mut [&mut w, &mut u], s);
                }
                i -= 1;
            }
            return Ok(Inward { w, u, w_from: i });
        }
        Ok(Inward {
            w,
            u,
            w_from: mesh.n_log,
        })
    } else {
        // Pure-log mesh: start from decay in u, convert to w.
        let n = mesh.n_log;
        let dx = mesh.dx;
        let h2x = dx * dx;
        let r_end = mesh.r_log[n - 1];
        let r_prev = mesh.r_log[n - 2];
        let kap = (mesh.v * mesh.f_log[n - 1] - e).max(1e-12).sqrt();
        let u_end = 1.0;
        let u_prev = (kap * (r_end - r_prev)).exp();
        w[n - 1] = u_end / r_end.sqrt();
        w[n - 2] = u_prev / r_prev.sqrt();
        let mut i = n - 2;
        while i > downto {
            let y = numerov_next(
                h2x,
                mesh.g_log(i + 1, e),
                mesh.g_log(i, e),
                mesh.g_log(i - 1, e),
                w[i + 1],
                w[i],
            );
            if !y.is_finite() {
                return Err(Error::NumericalInstability(
                    "inward log sweep diverged".into(),
                ));
            }
            w[i - 1] = y;
            if y.abs() > RENORM_THRESHOLD {
                let s = 1.0 / y.abs();
                renormalize(&mut [&mut w], s);
            }
            i -= 1;
        }
        Ok(Inward { w, u, w_from: i })
    }
}

/// Pick the match node: the outermost classical turning point, clamped
/// away from the ends and the junction so centered stencils stay clean.
fn choose_match(mesh: &Mesh, e: f64) -> usize {
    let n_tot = mesh.total();
    let mut idx = n_tot / 2;
    for i in (0..n_tot).rev() {
        if mesh.veff(i, e) < e {
            idx = i;
            break;
        }
    }
    let j0 = mesh.junction();
    let mut m = idx.clamp(4, n_tot.saturating_sub(5));
    if mesh.n_lin > 0 {
        let dist = m as isize - j0 as isize;
        if dist.abs() < 4 {
            m = if dist >= 0 { j0 + 4 } else { j0 - 4 };
            m = m.clamp(4, n_tot - 5);
        }
    }
    m
}

/// 5-point centered first derivative.
fn centered_deriv(ym2: f64, ym1: f64, yp1: f64, yp2: f64, h: f64) -> f64 {
    (ym2 - 8.0 * ym1 + 8.0 * yp1 - yp2) / (12.0 * h)
}

/// Normalized Wronskian defect between outward and inward solutions at the
/// match node; zero exactly at an eigenvalue, bounded in [-1, 1].
fn matching_defect(mesh: &Mesh, e: f64, m: usize) -> Result<f64> {
    let out = sweep_out(mesh, e, m + 2)?;
    let inn = sweep_in(mesh, e, m.saturating_sub(2))?;
    let j0 = mesh.junction();
    let (yo, ypo, yi, ypi) = if m < j0 || mesh.n_lin == 0 {
        let h = mesh.dx;
        let yo = out.w[m];
        let ypo = centered_deriv(out.w[m - 2], out.w[m - 1], out.w[m + 1], out.w[m + 2], h);
        let yi = inn.w[m];
        let ypi = centered_deriv(inn.w[m - 2], inn.w[m - 1], inn.w[m + 1], inn.w[m + 2], h);
        (yo, ypo, yi, ypi)
    } else {
        let h = mesh.dr;
        let j = m - j0;
        let yo = out.u[j];
        let ypo = centered_deriv(out.u[j - 2], out.u[j - 1], out.u[j + 1], out.u[j + 2], h);
        let yi = inn.u[j];
        let ypi = centered_deriv(inn.u[j - 2], inn.u[j - 1], inn.u[j + 1], inn.u[j + 2], h);
        (yo, ypo, yi, ypi)
    };
    let so = yo.hypot(ypo);
    let si = yi.hypot(ypi);
    if so == 0.0 || si == 0.0 {
        return Err(Error::NumericalInstability(
            "vanishing solution at match point".into(),
        ));
    }
    Ok((ypo * yi - ypi * yo) / (so * si))
}

fn count_nodes(mesh: &Mesh, e: f64) -> Result<usize> {
    Ok(sweep_out(mesh, e, mesh.total() - 1)?.nodes)
}

/// Node count of the outward solution plus one if its free asymptote
/// `a + b r` still crosses zero beyond the mesh (detected from the sign
/// of u·u' at the outer edge). Used at threshold energy, where the last
/// node of a marginally bound state wanders to large radius.
fn count_nodes_with_tail(mesh: &Mesh, e: f64) -> Result<usize> {
    let out = sweep_out(mesh, e, mesh.total() - 1)?;
    let (last, prev) = if mesh.n_lin > 0 {
        let n = out.u.len();
        if n < 2 {
            return Ok(out.nodes);
        }
        (out.u[n - 1], out.u[n - 2])
    } else {
        let n = out.w.len();
        // w = u/sqrt(r): same sign pattern
        (out.w[n - 1], out.w[n - 2])
    };
    let crossing_ahead = last != 0.0 && (last - prev).signum() != last.signum();
    Ok(out.nodes + usize::from(crossing_ahead))
}

struct EigenEstimate {
    energy: f64,
    residual: f64,
    converged: bool,
}

/// Bracket the requested node count, then drive the matching defect to zero.
fn eigen_iterate(
    mesh: &Mesh,
    target_nodes: usize,
    e_lo0: f64,
    e_hi0: f64,
    v: f64,
) -> Result<EigenEstimate> {
    let mut a = e_lo0;
    let mut b = e_hi0;
    let mut ca = count_nodes(mesh, a)?;
    let cb = count_nodes(mesh, b)?;
    if cb < target_nodes + 1 {
        return Err(Error::NoBoundState {
            v,
            nodes: target_nodes,
            e_lo: e_lo0,
            e_hi: e_hi0,
            r_max: mesh.r_max,
            count_lo: ca,
            count_hi: cb,
        });
    }
    if ca > target_nodes {
        return Err(Error::NumericalInstability(format!(
            "lower energy bound {e_lo0} already has {ca} nodes"
        )));
    }
    // Shrink [a, b] until it contains exactly the target eigenvalue.
    let mut cb = cb;
    for _ in 0..200 {
        if ca == target_nodes && cb == target_nodes + 1 {
            break;
        }
        let mid = 0.5 * (a + b);
        let c = count_nodes(mesh, mid)?;
        if c <= target_nodes {
            a = mid;
            ca = c;
        } else {
            b = mid;
            cb = c;
        }
    }
    if !(ca == target_nodes && cb == target_nodes + 1) {
        return Err(Error::NumericalInstability(
            "node-count bracketing failed to isolate the state".into(),
        ));
    }

    let m = choose_match(mesh, 0.5 * (a + b));
    let mut da = matching_defect(mesh, a, m)?;
    let mut db = matching_defect(mesh, b, m)?;
    // The defect brackets a sign change once the interval holds one state;
    // if numerics disagree, keep halving by node count.
    let mut guard = 0;
    while da.signum() == db.signum() && guard < 80 {
        let mid = 0.5 * (a + b);
        if count_nodes(mesh, mid)? <= target_nodes {
            a = mid;
            da = matching_defect(mesh, a, m)?;
        } else {
            b = mid;
            db = matching_defect(mesh, b, m)?;
        }
        if (b - a).abs() <= 1e-14 * a.abs().max(b.abs()).max(1e-10) {
            break;
        }
        guard += 1;
    }

    let scale = a.abs().max(b.abs()).max(1e-10);
    let mut best_e = 0.5 * (a + b);
    let mut best_d = f64::INFINITY;
    let mut converged = false;
    for _ in 0..200 {
        if (b - a).abs() <= 1e-14 * scale {
            converged = true;
            break;
        }
        // secant candidate, safeguarded by the bisection bracket
        let mut cand = if (db - da).abs() > 0.0 {
            b - db * (b - a) / (db - da)
        } else {
            0.5 * (a + b)
        };
        if !(cand > a && cand < b) {
            cand = 0.5 * (a + b);
        }
        let dc = matching_defect(mesh, cand, m)?;
        if dc.abs() < best_d {
            best_d = dc.abs();
            best_e = cand;
        }
        if dc.abs() < 1e-12 {
            converged = true;
            break;
        }
        if dc.signum() == da.signum() {
            a = cand;
            da = dc;
        } else {
            b = cand;
            db = dc;
        }
    }
    if !converged && (b - a).abs() <= 1e-11 * scale {
        converged = true;
    }
    Ok(EigenEstimate {
        energy: best_e,
        residual: best_d,
        converged,
    })
}

// ---------------------------------------------------------------------------
// Quadrature on the composite mesh

fn simpson(vals: &[f64], h: f64) -> f64 {
    let n = vals.len();
    if n < 2 {
        return 0.0;
    }
    let mut total = 0.0;
    let pairs = (n - 1) / 2;
    for p in 0..pairs {
        let i = 2 * p;
        total += h / 3.0 * (vals[i] + 4.0 * vals[i + 1] + vals[i + 2]);
    }
    if (n - 1) % 2 == 1 {
        total += 0.5 * h * (vals[n - 2] + vals[n - 1]);
    }
    total
}

fn strided(vals: &[f64]) -> Vec<f64> {
    vals.iter().copied().step_by(2).collect()
}

/// Assembled, matched solution on the full mesh.
struct Assembled {
    w: Vec<f64>,
    u: Vec<f64>,
    nodes: usize,
}

fn assemble(mesh: &Mesh, e: f64) -> Result<Assembled> {
    let m = choose_match(mesh, e);
    let out = sweep_out(mesh, e, m)?;
    let inn = sweep_in(mesh, e, m)?;
    let j0 = mesh.junction();
    let (out_val, in_val) = if m < j0 || mesh.n_lin == 0 {
        (out.w[m], inn.w[m])
    } else {
        (out.u[m - j0], inn.u[m - j0])
    };
    if in_val == 0.0 {
        return Err(Error::NumericalInstability(
            "inward solution vanishes at match point".into(),
        ));
    }
    let scale = out_val / in_val;

    let mut w = vec![0.0; mesh.n_log];
    let mut u = vec![0.0; mesh.n_lin];
    for i in 0..mesh.n_log {
        if i <= m && i < out.w.len() {
            w[i] = out.w[i];
        } else if i >= inn.w_from {
            w[i] = inn.w[i] * scale;
        }
    }
    for j in 0..mesh.n_lin {
        let g = j0 + j;
        if g <= m && j < out.u.len() {
            u[j] = out.u[j];
        } else if g >= m {
            u[j] = inn.u[j] * scale;
        }
    }
    if mesh.n_lin > 0 {
        // keep the shared junction point consistent
        u[0] = w[mesh.n_log - 1] * mesh.r_log[mesh.n_log - 1].sqrt();
    }

    let mut nodes = 0usize;
    let mut prev = 0.0f64;
    for i in 0..mesh.n_log {
        count_step(prev, w[i], &mut nodes);
        prev = w[i];
    }
    for j in 1..mesh.n_lin {
        count_step(prev, u[j], &mut nodes);
        prev = u[j];
    }
    Ok(Assembled { w, u, nodes })
}

/// norm and ⟨f⟩ integrals over the composite mesh; u = √r w on the log part
/// so u² dr = w² r² dx.
fn observables(mesh: &Mesh, sol: &Assembled) -> (f64, f64, f64) {
    let wr2: Vec<f64> = (0..mesh.n_log)
        .map(|i| sol.w[i] * sol.w[i] * mesh.r_log[i] * mesh.r_log[i])
        .collect();
    let wr2f: Vec<f64> = (0..mesh.n_log).map(|i| wr2[i] * mesh.f_log[i]).collect();
    let u2: Vec<f64> = (0..mesh.n_lin).map(|j| sol.u[j] * sol.u[j]).collect();
    let u2f: Vec<f64> = (0..mesh.n_lin).map(|j| u2[j] * mesh.f_lin[j]).collect();

    let norm = simpson(&wr2, mesh.dx) + simpson(&u2, mesh.dr);
    let expect = simpson(&wr2f, mesh.dx) + simpson(&u2f, mesh.dr);
    let norm_coarse = simpson(&strided(&wr2), 2.0 * mesh.dx) + simpson(&strided(&u2), 2.0 * mesh.dr);
    (norm, expect, norm_coarse)
}

// ---------------------------------------------------------------------------
// Public operations

/// Rigorous lower bound on the ground-state energy:
/// `min_{r>0} [1/(4r²) + v f(r)]` (grid scan plus golden refinement).
pub fn energy_lower_bound(shape: &PotentialShape, v: f64) -> Result<f64> {
    if v <= 0.0 {
        return Err(Error::domain(format!("coupling must be positive, got {v}")));
    }
    let obj = |r: f64| match eval_shape(shape, r) {
        Ok(f) => 0.25 / (r * r) + v * f,
        Err(_) => f64::INFINITY,
    };
    let mut lo = 1e-9;
    let mut hi = 1e4;
    let interior = loop {
        match search::minimize(obj, lo, hi, true, 200) {
            Ok(ext) => break Some(ext.value),
            Err(Error::BoundaryMinimum {
                side: crate::error::Side::Lower,
                ..
            }) => {
                if lo <= 1e-13 {
                    return Err(Error::InvariantViolation(
                        "1/(4r²) + v f(r) is unbounded below toward the origin; \
                         the shape is more singular than Coulomb"
                            .into(),
                    ));
                }
                lo /= 100.0;
            }
            Err(Error::BoundaryMinimum {
                side: crate::error::Side::Upper,
                ..
            }) => {
                if shape.confining_tail() {
                    return Err(Error::InvariantViolation(
                        "confining shape with decreasing objective at large r".into(),
                    ));
                }
                if hi >= 1e12 {
                    break None; // infimum approached at infinity
                }
                hi *= 100.0;
            }
            Err(e) => return Err(e),
        }
    };
    match shape.tail_limit() {
        Some(l) => {
            let at_infinity = v * l;
            Ok(match interior {
                Some(m) => m.min(at_infinity),
                None => at_infinity,
            })
        }
        None => interior.ok_or_else(|| {
            Error::InvariantViolation("no interior minimum for confining shape".into())
        }),
    }
}

/// Envelope-style energy estimate used to size the initial outer radius:
/// `min_r [(n+ℓ)²/r² + v f(r)]`.
fn energy_estimate(shape: &PotentialShape, v: f64, n: u32, ell: u32) -> Option<f64> {
    let p2 = ((n + ell) as f64).powi(2);
    let obj = |r: f64| match eval_shape(shape, r) {
        Ok(f) => p2 / (r * r) + v * f,
        Err(_) => f64::INFINITY,
    };
    search::minimize(obj, 1e-8, 1e6, true, 300).ok().map(|e| e.value)
}

fn initial_r_max(shape: &PotentialShape, v: f64, n: u32, ell: u32, ctl: &GridControls) -> f64 {
    if ctl.r_max_initial > 0.0 {
        return ctl.r_max_initial;
    }
    let est = energy_estimate(shape, v, n, ell);
    // a deeply bound state is confined by its own binding energy before
    // any outer wall matters
    let binding_scale = match est {
        Some(e) if e < -1e-8 => 22.0 / (-e).sqrt(),
        _ => f64::INFINITY,
    };
    if shape.confining_tail() {
        let e_est = est.unwrap_or(1.0).max(1e-2);
        // outermost turning radius for the estimate, plus a decay margin
        let mut r_turn: f64 = 1.0;
        for i in 0..400 {
            let r = 1e-3 * (1e6f64).powf(i as f64 / 399.0);
            if let Ok(f) = eval_shape(shape, r) {
                if v * f < e_est {
                    r_turn = r;
                }
            }
        }
        let kappa = {
            let r_probe = r_turn * 1.3;
            match eval_shape(shape, r_probe) {
                Ok(f) => (v * f - e_est).max(0.25).sqrt(),
                Err(_) => 1.0,
            }
        };
        let wall = 1.3 * r_turn + 14.0 / kappa;
        wall.min(binding_scale).clamp(1e-3, 400.0)
    } else if binding_scale.is_finite() {
        binding_scale.clamp(1.0, ctl.r_max_cap * 0.5)
    } else {
        60.0
    }
}

/// Solve one bound state to the requested node count.
///
/// The outer radius doubles until the eigenvalue is insensitive to it;
/// absence of the state at the largest radius is reported as
/// [`Error::NoBoundState`] with the bracketing evidence.
pub fn solve_state(problem: &RadialProblem) -> Result<EigenSolution> {
    let RadialProblem { shape, v, n, ell, grid } = problem;
    let (v, n, ell) = (*v, *n, *ell);
    if v <= 0.0 {
        return Err(Error::domain(format!("coupling must be positive, got {v}")));
    }
    if n < 1 {
        return Err(Error::domain("radial index n must be >= 1"));
    }
    let target_nodes = (n - 1) as usize;

    let e_lb = energy_lower_bound(shape, v)?;
    let e_lo = e_lb - 1e-9 * e_lb.abs().max(1.0);
    let threshold = shape.tail_limit().map(|l| v * l);

    let mut r_max = initial_r_max(shape, v, n, ell, grid);
    let mut doublings = 0usize;
    let mut prev_solution: Option<(Mesh, EigenEstimate)> = None;
    let mut last_no_bound: Option<Error> = None;
    let mut spacing: Option<MeshSpacing> = None;

    loop {
        let mesh = build_mesh(shape, v, ell, e_lo, r_max, grid, spacing)?;
        if mesh.n_lin > 0 {
            spacing = Some(MeshSpacing {
                dx: mesh.dx,
                dr: mesh.dr,
            });
        }
        let e_hi = match threshold {
            Some(t) => {
                let pad = 1e-11 * e_lo.abs().max(1.0);
                if t - pad <= e_lo {
                    return Err(Error::NoBoundState {
                        v,
                        nodes: target_nodes,
                        e_lo,
                        e_hi: t,
                        r_max,
                        count_lo: 0,
                        count_hi: 0,
                    });
                }
                t - pad
            }
            None => {
                // confining: expand upward until the node count covers the state
                let mut hi = e_lo + e_lo.abs().max(1.0);
                let mut span = e_lo.abs().max(1.0);
                let mut ok = false;
                for _ in 0..80 {
                    if count_nodes(&mesh, hi)? > target_nodes {
                        ok = true;
                        break;
                    }
                    span *= 2.0;
                    hi += span;
                }
                if !ok {
                    return Err(Error::UnboundedSearch(
                        "could not bracket the state from above for a confining shape".into(),
                    ));
                }
                hi
            }
        };

        match eigen_iterate(&mesh, target_nodes, e_lo, e_hi, v) {
            Ok(est) => {
                let accept = match &prev_solution {
                    Some((_, prev_est)) => {
                        (est.energy - prev_est.energy).abs()
                            <= grid.e_change_tol * est.energy.abs().max(1.0)
                    }
                    None => false,
                };
                if accept || r_max * 2.0 > grid.r_max_cap {
                    // On acceptance the PREVIOUS (smaller) radius already
                    // proved sufficient; finish on that mesh so repeated
                    // solves at similar couplings do not ratchet r_max up.
                    let (fin_mesh, fin_est) = if accept {
                        prev_solution.take().unwrap()
                    } else {
                        (mesh, est)
                    };
                    let sol = assemble(&fin_mesh, fin_est.energy)?;
                    if sol.nodes != target_nodes {
                        return Err(Error::NumericalInstability(format!(
                            "assembled solution has {} nodes, expected {target_nodes}",
                            sol.nodes
                        )));
                    }
                    let (norm, expect, norm_coarse) = observables(&fin_mesh, &sol);
                    if !(norm > 0.0) || !norm.is_finite() {
                        return Err(Error::NumericalInstability(
                            "non-positive norm integral".into(),
                        ));
                    }
                    return Ok(EigenSolution {
                        energy: fin_est.energy,
                        nodes: sol.nodes,
                        norm_check: 1.0 + (norm_coarse / norm - 1.0) / 15.0,
                        expectation_f: expect / norm,
                        converged: fin_est.converged && accept,
                        residual: fin_est.residual,
                        mesh: MeshStats {
                            r_min: grid.r_min,
                            r_join: if fin_mesh.n_lin == 0 {
                                fin_mesh.r_max
                            } else {
                                grid.r_join
                            },
                            r_max: fin_mesh.r_max,
                            n_log: fin_mesh.n_log,
                            n_lin: fin_mesh.n_lin,
                            r_max_doublings: doublings,
                        },
                    });
                }
                prev_solution = Some((mesh, est));
                r_max *= 2.0;
                doublings += 1;
            }
            Err(e @ Error::NoBoundState { .. }) => {
                // Possibly a box artifact: a marginally bound state needs
                // room. States surviving only beyond the absence cap are
                // reported absent with the evidence gathered.
                const ABSENCE_R_CAP: f64 = 8000.0;
                if r_max * 2.0 <= grid.r_max_cap.min(ABSENCE_R_CAP) {
                    last_no_bound = Some(e);
                    prev_solution = None;
                    r_max *= 2.0;
                    doublings += 1;
                } else {
                    return Err(last_no_bound.unwrap_or(e));
                }
            }
            Err(e) => return Err(e),
        }
    }
}

/// Sampled spectral curve with Hellmann–Feynman derivatives `F'(v) = ⟨f⟩`.
///
/// Points are solved from the largest coupling down (deep states teach the
/// outer-radius adaptation cheaply); failures at individual grid points
/// produce [`Error::PartialCurve`] listing them.
pub fn spectral_curve(
    shape: &PotentialShape,
    n: u32,
    ell: u32,
    v_grid: &[f64],
) -> Result<SpectralCurve> {
    if v_grid.len() < 2 || v_grid.windows(2).any(|w| w[1] <= w[0]) || v_grid[0] <= 0.0 {
        return Err(Error::domain(
            "v_grid must be strictly increasing and positive",
        ));
    }
    let mut computed: Vec<(f64, f64, f64)> = Vec::with_capacity(v_grid.len());
    let mut failed: Vec<(f64, String)> = Vec::new();
    let mut r_max_hint: f64 = 0.0;
    for &v in v_grid.iter().rev() {
        let mut problem = RadialProblem::new(shape.clone(), v, n, ell);
        if r_max_hint > 0.0 {
            problem.grid.r_max_initial = r_max_hint;
        }
        match solve_state(&problem) {
            Ok(sol) => {
                r_max_hint = sol.mesh.r_max;
                computed.push((v, sol.energy, sol.expectation_f));
            }
            Err(e) => failed.push((v, e.to_string())),
        }
    }
    computed.reverse();
    failed.reverse();
    if !failed.is_empty() {
        return Err(Error::PartialCurve { computed, failed });
    }
    let v: Vec<f64> = computed.iter().map(|p| p.0).collect();
    let f: Vec<f64> = computed.iter().map(|p| p.1).collect();
    let fp: Vec<f64> = computed.iter().map(|p| p.2).collect();
    SpectralCurve::from_samples(v, f, fp, StateLabel::new(n, ell))
}

/// Smallest coupling at which the state `(n, ℓ)` exists.
///
/// Confining shapes (and any shape that already binds at vanishing
/// coupling, like the Coulomb tail) return 0. Otherwise the zero-energy
/// solution's node count — which equals the number of bound states below
/// the threshold — is bisected over the coupling.
pub fn detect_critical_coupling(shape: &PotentialShape, n: u32, ell: u32) -> Result<f64> {
    if n < 1 {
        return Err(Error::domain("radial index n must be >= 1"));
    }
    if shape.confining_tail() || shape.long_range_tail() {
        // the discrete spectrum exists for every positive coupling
        return Ok(0.0);
    }
    let tail = shape.tail_limit().unwrap_or(0.0);
    let target = n as usize;

    let count_at = |v: f64| -> Result<usize> {
        let ctl = GridControls {
            dx_log_cap: 5e-3,
            dr_lin_cap: 4e-2,
            ..GridControls::default()
        };
        let e = v * tail;
        let mut r_big: f64 = 80.0;
        let mut last = usize::MAX;
        loop {
            let mesh = build_mesh(shape, v, ell, e - 1.0, r_big, &ctl, None)?;
            let c = count_nodes_with_tail(&mesh, e - 1e-12 * e.abs().max(1.0))?;
            if c == last || r_big >= 2_560.0 {
                return Ok(c);
            }
            last = c;
            r_big *= 2.0;
        }
    };

    if count_at(1e-6)? >= target {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    while count_at(hi)? < target {
        hi *= 2.0;
        if hi > 1e9 {
            return Err(Error::UnboundedSearch(format!(
                "state (n={n}, ell={ell}) not found below coupling 1e9"
            )));
        }
    }
    let mut lo = (hi / 2.0).max(1e-6);
    while hi - lo > 1e-4 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if count_at(mid)? >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
