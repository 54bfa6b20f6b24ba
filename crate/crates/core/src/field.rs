//! Far-field phasor sum `E = A_β Σ_{j=1}^{N} exp(i(βj + φ_j))`, with the
//! single-slit envelope `A_β = E₀ sinc(β/2)`.

use crate::error::{Error, Result};

/// Threshold on `|sin(β/2)|` below which the Dirichlet ratio
/// `sin²(βN/2)/sin²(β/2)` is replaced by its limit `N²`.
const DIRICHLET_LIMIT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldParams {
    pub e0: f64,
    pub beta: f64,
    pub n: usize,
}

impl FieldParams {
    pub fn new(beta: f64, n: usize, e0: f64) -> Result<Self> {
        if !(e0 > 0.0 && e0.is_finite()) {
            return Err(Error::arg(format!("e0 must be positive, got {e0}")));
        }
        if n == 0 {
            return Err(Error::arg("need at least one wave"));
        }
        if !beta.is_finite() {
            return Err(Error::arg(format!("beta must be finite, got {beta}")));
        }
        Ok(FieldParams { e0, beta, n })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub re: f64,
    pub im: f64,
    pub intensity: f64,
}

pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `A_β = E₀ sinc(β/2)`.
pub fn envelope(beta: f64, e0: f64) -> f64 {
    e0 * sinc(0.5 * beta)
}

fn check_len(phases: &[f64], params: &FieldParams) -> Result<()> {
    if phases.len() != params.n {
        return Err(Error::arg(format!(
            "phase vector has {} entries, field expects {}",
            phases.len(),
            params.n
        )));
    }
    Ok(())
}

/// Direct evaluation of the field and `I = |E|²`; `j` runs over `1..=N`.
pub fn field_intensity(phases: &[f64], params: &FieldParams) -> Result<FieldSample> {
    check_len(phases, params)?;
    let amp = envelope(params.beta, params.e0);
    let (mut sc, mut ss) = (0.0, 0.0);
    for (j, phi) in (1..=phases.len()).zip(phases) {
        let arg = params.beta * j as f64 + phi;
        sc += arg.cos();
        ss += arg.sin();
    }
    let (re, im) = (amp * sc, amp * ss);
    Ok(FieldSample {
        re,
        im,
        intensity: re * re + im * im,
    })
}

/// `A_β²[N + Σ_{j≠l} cos(β(j-l) + φ_j - φ_l)]`. Quadratic cost; this is the
/// reference form the direct sum is checked against.
pub fn intensity_expanded(phases: &[f64], params: &FieldParams) -> Result<f64> {
    check_len(phases, params)?;
    let amp = envelope(params.beta, params.e0);
    let mut cross = 0.0;
    for (j, pj) in phases.iter().enumerate() {
        for (l, pl) in phases.iter().enumerate().skip(j + 1) {
            // j≠l terms come in equal (j,l)/(l,j) pairs since cos is even
            cross += 2.0 * (params.beta * (j as f64 - l as f64) + (pj - pl)).cos();
        }
    }
    Ok(amp * amp * (phases.len() as f64 + cross))
}

/// Mean intensity for i.i.d. phases with `a = E[cos φ]`, `b = E[sin φ]`:
/// `A_β²[N + (a²+b²)(sin²(βN/2)/sin²(β/2) - N)]`.
pub fn expected_intensity(beta: f64, n: usize, a: f64, b: f64, e0: f64) -> f64 {
    let nf = n as f64;
    let amp = envelope(beta, e0);
    let half = (0.5 * beta).sin();
    let dirichlet = if half.abs() < DIRICHLET_LIMIT_EPS {
        nf * nf
    } else {
        let num = (0.5 * beta * nf).sin();
        num * num / (half * half)
    };
    amp * amp * (nf + (a * a + b * b) * (dirichlet - nf))
}

/// Number of realizations evaluated side by side in the grid kernel.
pub const LANES: usize = 8;

/// Precomputed `cos(βj)`, `sin(βj)` tables for a fixed `β` grid and `N`,
/// evaluating many phase vectors against every grid point.
///
/// Each realization occupies one lane; a lane's sums accumulate in ascending
/// `j` with the same operations whatever the other lanes hold, so results
/// are bit-identical between batched and single evaluation.
#[derive(Debug, Clone)]
pub struct GridEvaluator {
    n: usize,
    betas: Vec<f64>,
    amp: Vec<f64>,
    cos_table: Vec<f64>,
    sin_table: Vec<f64>,
}

impl GridEvaluator {
    pub fn new(betas: &[f64], n: usize, e0: f64) -> Result<Self> {
        if betas.is_empty() {
            return Err(Error::arg("empty beta grid"));
        }
        for &b in betas {
            FieldParams::new(b, n, e0)?;
        }
        let mut cos_table = Vec::with_capacity(betas.len() * n);
        let mut sin_table = Vec::with_capacity(betas.len() * n);
        for &beta in betas {
            for j in 1..=n {
                let (s, c) = (beta * j as f64).sin_cos();
                cos_table.push(c);
                sin_table.push(s);
            }
        }
        Ok(GridEvaluator {
            n,
            betas: betas.to_vec(),
            amp: betas.iter().map(|&b| envelope(b, e0)).collect(),
            cos_table,
            sin_table,
        })
    }

    pub fn n_waves(&self) -> usize {
        self.n
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    /// Intensities of one phase vector at every grid point.
    pub fn evaluate(&self, phases: &[f64], out: &mut [f64]) -> Result<()> {
        self.evaluate_batch(&[phases], &mut [out])
    }

    /// Evaluate up to [`LANES`] phase vectors; `out[k]` receives the grid
    /// intensities of `phases[k]`.
    pub fn evaluate_batch(&self, phases: &[&[f64]], out: &mut [&mut [f64]]) -> Result<()> {
        if phases.len() > LANES || phases.len() != out.len() {
            return Err(Error::arg(format!(
                "batch of {} phase vectors and {} outputs (max {LANES})",
                phases.len(),
                out.len()
            )));
        }
        for (p, o) in phases.iter().zip(out.iter()) {
            if p.len() != self.n || o.len() != self.betas.len() {
                return Err(Error::arg(format!(
                    "expected {} phases and {} outputs, got {} and {}",
                    self.n,
                    self.betas.len(),
                    p.len(),
                    o.len()
                )));
            }
        }

        // Unused lanes hold zero phasors, which add exact zeros.
        let mut cphi = vec![[0.0f64; LANES]; self.n];
        let mut sphi = vec![[0.0f64; LANES]; self.n];
        for (lane, p) in phases.iter().enumerate() {
            for (j, &phi) in p.iter().enumerate() {
                let (s, c) = phi.sin_cos();
                cphi[j][lane] = c;
                sphi[j][lane] = s;
            }
        }

        for (row, &amp) in self.amp.iter().enumerate() {
            let ct = &self.cos_table[row * self.n..(row + 1) * self.n];
            let st = &self.sin_table[row * self.n..(row + 1) * self.n];
            let mut re = [0.0f64; LANES];
            let mut im = [0.0f64; LANES];
            for j in 0..self.n {
                let (cb, sb) = (ct[j], st[j]);
                let (c, s) = (&cphi[j], &sphi[j]);
                for l in 0..LANES {
                    re[l] += cb * c[l] - sb * s[l];
                    im[l] += sb * c[l] + cb * s[l];
                }
            }
            for (lane, o) in out.iter_mut().enumerate() {
                let (r, i) = (amp * re[lane], amp * im[lane]);
                o[row] = r * r + i * i;
            }
        }
        Ok(())
    }
}
