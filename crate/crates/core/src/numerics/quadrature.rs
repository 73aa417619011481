//! Adaptive Gauss-Kronrod quadrature over `[0, inf)` for integrands given by their
//! logarithm.
//!
//! The integrand is located by a geometric scan of `t`, truncated where the
//! log-integrand has fallen `truncation_log_cutoff` below its running maximum, and
//! integrated panel by panel as `exp(log_f(t) - M)` with `M` the running maximum.
//! The scale `e^M` is carried separately so peaks far outside the `f64` exponent
//! range are still integrated.

use crate::error::{Error, Result};

/// Tolerances and limits for [`integrate_semi_infinite`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Number of adaptive subdivision rounds before giving up.
    pub max_refinements: u32,
    /// Natural-log distance below the running maximum at which the tail is dropped.
    pub truncation_log_cutoff: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-300,
            max_refinements: 60,
            truncation_log_cutoff: 40.0,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::Config(format!(
                "rel_tol and abs_tol must be positive (got {:e} and {:e})",
                self.rel_tol, self.abs_tol
            )));
        }
        if self.max_refinements < 1 {
            return Err(Error::Config("max_refinements must be at least 1".into()));
        }
        if !(self.truncation_log_cutoff >= 30.0) {
            return Err(Error::Config(format!(
                "truncation_log_cutoff must be at least 30 (got {})",
                self.truncation_log_cutoff
            )));
        }
        Ok(())
    }
}

/// Result of a semi-infinite integration, stored as `scaled * e^log_scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub scaled: f64,
    pub scaled_error: f64,
    pub log_scale: f64,
    pub panels: usize,
    pub rounds: u32,
}

impl Integral {
    pub fn value(&self) -> f64 {
        self.scaled * self.log_scale.exp()
    }

    pub fn error_bound(&self) -> f64 {
        self.scaled_error * self.log_scale.exp()
    }

    /// Natural log of the integral; finite even when [`Integral::value`] overflows.
    pub fn ln_value(&self) -> f64 {
        self.scaled.ln() + self.log_scale
    }

    /// Estimated relative error.
    pub fn rel_error(&self) -> f64 {
        if self.scaled == 0.0 {
            0.0
        } else {
            self.scaled_error / self.scaled.abs()
        }
    }
}

// 21-point Kronrod nodes (non-negative half, descending) and weights, with the
// embedded 10-point Gauss weights for the odd-indexed nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    /// Largest log-integrand seen inside the panel.
    peak: f64,
}

/// Evaluates `exp(log_f - shift)` at one node, rejecting NaN and `+inf`.
fn scaled_at<F: Fn(f64) -> f64>(log_f: &F, t: f64, shift: f64, peak: &mut f64) -> Result<f64> {
    let l = log_f(t);
    if l.is_nan() || l == f64::INFINITY {
        return Err(Error::domain(format!(
            "log-integrand must be finite or -inf, got {l} at t = {t}"
        )));
    }
    if l > *peak {
        *peak = l;
    }
    Ok((l - shift).exp())
}

/// QUADPACK-style error rescaling of the raw Kronrod/Gauss difference.
fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut err = err.abs();
    if resasc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / resasc).powf(1.5);
        err = if scale < 1.0 { resasc * scale } else { resasc };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    err
}

fn gauss_kronrod_21<F: Fn(f64) -> f64>(log_f: &F, lo: f64, hi: f64, shift: f64) -> Result<Panel> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut peak = f64::NEG_INFINITY;

    let mut fv = [0.0; 21];
    fv[10] = scaled_at(log_f, center, shift, &mut peak)?;
    for (j, &x) in XGK[..10].iter().enumerate() {
        let dx = half * x;
        fv[j] = scaled_at(log_f, center - dx, shift, &mut peak)?;
        fv[20 - j] = scaled_at(log_f, center + dx, shift, &mut peak)?;
    }

    let mut kronrod = WGK[10] * fv[10];
    let mut gauss = 0.0;
    let mut resabs = WGK[10] * fv[10].abs();
    for j in 0..10 {
        let pair = fv[j] + fv[20 - j];
        kronrod += WGK[j] * pair;
        resabs += WGK[j] * (fv[j].abs() + fv[20 - j].abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let mean = 0.5 * kronrod;
    let mut resasc = WGK[10] * (fv[10] - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv[j] - mean).abs() + (fv[20 - j] - mean).abs());
    }

    let width = half.abs();
    let error = rescale_error((kronrod - gauss) * half, resabs * width, resasc * width);
    Ok(Panel {
        lo,
        hi,
        value: kronrod * half,
        error,
        peak,
    })
}

const SCAN_START: f64 = 1.0 / (1u64 << 30) as f64;
const SCAN_LIMIT: f64 = 1e300;
const MAX_PANELS: usize = 200_000;
const MAX_RESCALES: usize = 8;

/// Geometric breakpoints `0, t0, 2 t0, 4 t0, ...` up to the truncation point, and
/// the largest log-integrand seen on them.
fn scan<F: Fn(f64) -> f64>(log_f: &F, cutoff: f64) -> Result<(Vec<f64>, f64)> {
    let mut peak = f64::NEG_INFINITY;
    let mut breaks = vec![0.0];
    let mut prev = scaled_log(log_f, 0.0)?;
    peak = peak.max(prev);
    let mut t = SCAN_START;
    loop {
        let l = scaled_log(log_f, t)?;
        peak = peak.max(l);
        breaks.push(t);
        let decaying = l <= prev;
        if peak > f64::NEG_INFINITY && decaying && l < peak - cutoff {
            return Ok((breaks, peak));
        }
        prev = l;
        t *= 2.0;
        if t > SCAN_LIMIT {
            if peak == f64::NEG_INFINITY {
                return Ok((breaks, peak));
            }
            return Err(Error::domain(
                "log-integrand does not decay: no truncation point found below 1e300",
            ));
        }
    }
}

fn scaled_log<F: Fn(f64) -> f64>(log_f: &F, t: f64) -> Result<f64> {
    let mut l = f64::NEG_INFINITY;
    scaled_at(log_f, t, f64::INFINITY, &mut l)?;
    Ok(l)
}

/// Integrates `exp(log_f(t))` over `t` in `[0, inf)`.
///
/// `log_f` may return `-inf` where the integrand vanishes and must decay
/// eventually. The returned [`Integral`] carries its own scale factor.
pub fn integrate_semi_infinite<F>(log_f: F, cfg: &QuadratureConfig) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    let (breaks, mut shift) = scan(&log_f, cfg.truncation_log_cutoff)?;
    if shift == f64::NEG_INFINITY {
        return Ok(Integral {
            scaled: 0.0,
            scaled_error: 0.0,
            log_scale: 0.0,
            panels: 0,
            rounds: 0,
        });
    }

    for _ in 0..MAX_RESCALES {
        match refine(&log_f, &breaks, shift, cfg)? {
            Refined::Done(integral) => return Ok(integral),
            Refined::Rescale(new_shift) => shift = new_shift,
        }
    }
    Err(Error::domain(
        "log-integrand peak could not be bracketed by the running maximum",
    ))
}

enum Refined {
    Done(Integral),
    Rescale(f64),
}

fn refine<F: Fn(f64) -> f64>(
    log_f: &F,
    breaks: &[f64],
    shift: f64,
    cfg: &QuadratureConfig,
) -> Result<Refined> {
    // Values above the shift by this much risk overflow once summed.
    const RESCALE_MARGIN: f64 = 300.0;

    let mut panels = breaks
        .windows(2)
        .map(|w| gauss_kronrod_21(log_f, w[0], w[1], shift))
        .collect::<Result<Vec<_>>>()?;

    let mut round = 0;
    loop {
        let peak = panels
            .iter()
            .map(|p| p.peak)
            .fold(f64::NEG_INFINITY, f64::max);
        if peak > shift + RESCALE_MARGIN {
            return Ok(Refined::Rescale(peak));
        }

        let total: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let abs_floor = cfg.abs_tol * (-shift).exp();
        let tol = (cfg.rel_tol * total.abs()).max(abs_floor);
        if error <= tol {
            return Ok(Refined::Done(Integral {
                scaled: total,
                scaled_error: error,
                log_scale: shift,
                panels: panels.len(),
                rounds: round,
            }));
        }
        if round >= cfg.max_refinements || panels.len() > MAX_PANELS {
            return Err(Error::QuadratureNotConverged {
                estimate: total * shift.exp(),
                error_bound: error * shift.exp(),
                rounds: round,
            });
        }

        // Split every panel carrying more than its share of the tolerance.
        let share = tol / panels.len() as f64;
        let mut next = Vec::with_capacity(panels.len() * 2);
        let mut split_any = false;
        for p in panels {
            let mid = 0.5 * (p.lo + p.hi);
            if p.error > share && mid > p.lo && mid < p.hi {
                next.push(gauss_kronrod_21(log_f, p.lo, mid, shift)?);
                next.push(gauss_kronrod_21(log_f, mid, p.hi, shift)?);
                split_any = true;
            } else {
                next.push(p);
            }
        }
        panels = next;
        round += 1;
        if !split_any {
            let total: f64 = panels.iter().map(|p| p.value).sum();
            let error: f64 = panels.iter().map(|p| p.error).sum();
            return Err(Error::QuadratureNotConverged {
                estimate: total * shift.exp(),
                error_bound: error * shift.exp(),
                rounds: round,
            });
        }
    }
}
