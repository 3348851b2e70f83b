//! The five subcommands. Every artifact embeds the raw config for
//! provenance, and every byte written is a pure function of (config, seed).

use std::fs;
use std::path::{Path, PathBuf};

use brownq_core::esd::green::{classify, GreenLab};
use brownq_core::{
    build_system, curve_eval, normalized_score, run_pipeline_with_system, sample_spectrum,
    trace_omega, verify_against_curve, CurveConfig, CurveError, CurveResult, EnsembleSpec,
    GaussPoly, OmegaWitness, TwoAtomPair,
};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::svg::Overlay;

/// Exit codes fixed for scripting: 0 success, 2 degenerate curve,
/// 3 divisibility violation, 1 anything else.
pub const EXIT_OK: i32 = 0;
pub const EXIT_DEGENERATE: i32 = 2;
pub const EXIT_DIVISIBILITY: i32 = 3;

pub struct CmdError {
    pub code: i32,
    pub message: String,
}

impl CmdError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        CmdError {
            code,
            message: message.into(),
        }
    }
}

impl<E: std::error::Error> From<E> for CmdError {
    fn from(e: E) -> Self {
        CmdError::new(1, e.to_string())
    }
}

fn write_bytes(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, CmdError> {
    fs::create_dir_all(dir).map_err(|e| CmdError::new(1, format!("create {dir:?}: {e}")))?;
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| CmdError::new(1, format!("write {path:?}: {e}")))?;
    Ok(path)
}

fn write_json(dir: &Path, name: &str, value: &Value) -> Result<PathBuf, CmdError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CmdError::new(1, e.to_string()))?;
    text.push('\n');
    write_bytes(dir, name, text.as_bytes())
}

fn sig17(v: f64) -> String {
    format!("{v:.16e}")
}

fn poly_json(p: &GaussPoly, echo: &Value) -> Result<Value, CmdError> {
    let terms = p.to_json().map_err(|e| CmdError::new(1, e.to_string()))?;
    Ok(json!({ "config": echo, "vars": ["m", "x", "y"], "terms": terms }))
}

/// Two-atom view of the config, when both measures have exactly two atoms.
fn two_atom_pair(cfg: &RunConfig) -> Option<TwoAtomPair> {
    let (pa, pw) = (cfg.mu_p.atoms(), cfg.mu_p.weights());
    let (qa, qw) = (cfg.mu_q.atoms(), cfg.mu_q.weights());
    if pa.len() == 2 && qa.len() == 2 {
        TwoAtomPair::new(pa[0], pa[1], pw[0], qa[0], qa[1], qw[0]).ok()
    } else {
        None
    }
}

fn curve_pipeline(cfg: &RunConfig) -> Result<CurveResult, CmdError> {
    if !cfg.exact {
        return Err(CmdError::new(
            1,
            "curve requires exact rational measures; decimal entries only support omega/esd/greens",
        ));
    }
    let ccfg = CurveConfig::new(cfg.mu_p.clone(), cfg.mu_q.clone())
        .map_err(|e| CmdError::new(1, e.to_string()))?;
    let (mut p1, p2) = build_system(&ccfg).map_err(|e| CmdError::new(1, e.to_string()))?;
    // test-only hook: corrupt the system so the divisibility contract fails
    if std::env::var("BROWNQ_TEST_CORRUPT_F1").is_ok() {
        p1 = p1.add(&GaussPoly::one());
    }
    if ccfg.n() + ccfg.k() > 7 {
        eprintln!(
            "warning: n + k = {} exceeds the practical Sylvester cap of 7; expect heavy exact arithmetic",
            ccfg.n() + ccfg.k()
        );
    }
    run_pipeline_with_system(&ccfg, p1, p2).map_err(|e| match e {
        CurveError::DivisibilityViolation(_) => CmdError::new(EXIT_DIVISIBILITY, e.to_string()),
        other => CmdError::new(1, other.to_string()),
    })
}

pub fn cmd_curve(cfg: &RunConfig, out: &Path) -> Result<i32, CmdError> {
    let res = curve_pipeline(cfg)?;

    write_json(out, "curve_f1.json", &poly_json(&res.f1, &cfg.echo)?)?;
    write_json(out, "curve_f2.json", &poly_json(&res.f2, &cfg.echo)?)?;
    write_json(out, "curve_re_f2.json", &poly_json(&res.re_f2, &cfg.echo)?)?;
    write_json(out, "curve_im_f2.json", &poly_json(&res.im_f2, &cfg.echo)?)?;
    if let Some(f) = &res.f {
        write_json(out, "curve_f.json", &poly_json(f, &cfg.echo)?)?;
        write_json(
            out,
            "curve_f_normalized.json",
            &poly_json(&f.normalized(), &cfg.echo)?,
        )?;
    }

    let mut text = String::new();
    text.push_str(&format!("f1 = {}\n\nf2 = {}\n\n", res.f1, res.f2));
    text.push_str(&format!(
        "Re f2 = {}\n\nIm f2 = {}\n\n",
        res.re_f2, res.im_f2
    ));
    match &res.f {
        Some(f) => {
            text.push_str(&format!("f = {}\n\nf (normalized) = {}\n", f, f.normalized()))
        }
        None => text.push_str("f = <not computed: degenerate split>\n"),
    }
    write_bytes(out, "curve.txt", text.as_bytes())?;

    let report = json!({
        "config": cfg.echo,
        "n": cfg.mu_p.len(),
        "k": cfg.mu_q.len(),
        "degenerate": res.is_degenerate(),
        "re_f2_zero": res.re_f2_zero,
        "im_f2_zero": res.im_f2_zero,
        "f_zero": res.f_zero,
        "size_warning": res.size_warning,
        "f_terms": res.f.as_ref().map(|f| f.num_terms()),
        "f_total_degree": res.f.as_ref().map(|f| f.total_degree()),
    });
    write_json(out, "curve_report.json", &report)?;

    Ok(if res.is_degenerate() {
        EXIT_DEGENERATE
    } else {
        EXIT_OK
    })
}

fn witness_csv(witnesses: &[OmegaWitness]) -> String {
    let mut s = String::from("x,y,re_g,im_g,m,residual,branch_j,branch_l\n");
    for w in witnesses {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            sig17(w.z.re),
            sig17(w.z.im),
            sig17(w.g.re),
            sig17(w.g.im),
            sig17(w.m),
            sig17(w.residual),
            w.branch_j,
            w.branch_l
        ));
    }
    s
}

pub fn cmd_omega(cfg: &RunConfig, out: &Path) -> Result<i32, CmdError> {
    let grid = cfg
        .omega
        .grid
        .clone()
        .unwrap_or_default()
        .to_spec();
    let witnesses = trace_omega(&cfg.mu_p, &cfg.mu_q, &grid)?;
    write_bytes(out, "witnesses.csv", witness_csv(&witnesses).as_bytes())?;

    let max_residual = witnesses.iter().map(|w| w.residual).fold(0.0f64, f64::max);
    let flagged = witnesses.iter().filter(|w| w.flagged).count();
    let hyperbola = two_atom_pair(cfg).map(|pair| {
        let max_h = witnesses
            .iter()
            .map(|w| pair.hyperbola_residual(w.z).abs())
            .fold(0.0f64, f64::max);
        let all_in_rect = witnesses.iter().all(|w| pair.rect_membership(w.z, true));
        json!({ "max_hyperbola_residual": max_h, "all_in_open_rectangle": all_in_rect })
    });
    let summary = json!({
        "config": cfg.echo,
        "count": witnesses.len(),
        "flagged": flagged,
        "max_residual": max_residual,
        "two_atom_check": hyperbola,
        "grid": { "nx": grid.nx, "ny": grid.ny,
                  "re_range": grid.re_range, "im_range": grid.im_range },
    });
    write_json(out, "omega_summary.json", &summary)?;
    Ok(EXIT_OK)
}

fn ensemble(cfg: &RunConfig, n: usize, replicas: usize) -> EnsembleSpec {
    EnsembleSpec {
        mu_p: cfg.mu_p.clone(),
        mu_q: cfg.mu_q.clone(),
        n,
        seed: cfg.seed,
        replicas,
    }
}

pub fn cmd_esd(cfg: &RunConfig, out: &Path) -> Result<i32, CmdError> {
    let spec = ensemble(cfg, cfg.esd.n, cfg.esd.replicas);
    let sample = sample_spectrum(&spec)?;
    eprintln!(
        "esd: n = {}, eigensolve took {:.2}s",
        spec.n, sample.wall_time
    );

    let mut csv = String::from("re,im\n");
    for ev in &sample.eigenvalues {
        csv.push_str(&format!("{},{}\n", sig17(ev.re), sig17(ev.im)));
    }
    write_bytes(out, "spectrum.csv", csv.as_bytes())?;

    let meta = json!({
        "config": cfg.echo,
        "n": spec.n,
        "seed": spec.seed,
        "replica": sample.replica,
        "operator_bound": spec.operator_bound(),
    });
    write_json(out, "spectrum_meta.json", &meta)?;
    Ok(EXIT_OK)
}

pub fn cmd_greens(cfg: &RunConfig, out: &Path) -> Result<i32, CmdError> {
    let section = &cfg.greens;
    if section.points.is_empty() {
        return Err(CmdError::new(1, "greens.points is empty"));
    }
    let spec = ensemble(cfg, section.n, section.replicas);
    let lab = GreenLab::new(spec)?;
    let thresholds = section.thresholds.to_thresholds();
    let mut reports = Vec::new();
    for &(x, y) in &section.points {
        let est = lab.estimate_ladder(Complex64::new(x, y), &section.eps_ladder)?;
        let report = classify(est, &thresholds);
        reports.push(serde_json::to_value(&report).map_err(|e| CmdError::new(1, e.to_string()))?);
    }
    let doc = json!({
        "config": cfg.echo,
        "n": section.n,
        "replicas": section.replicas,
        "eps_ladder": section.eps_ladder,
        "thresholds": serde_json::to_value(thresholds).map_err(|e| CmdError::new(1, e.to_string()))?,
        "points": reports,
    });
    write_json(out, "greens.json", &doc)?;
    Ok(EXIT_OK)
}

pub fn cmd_verify(cfg: &RunConfig, out: &Path) -> Result<i32, CmdError> {
    // exact curve
    let curve = curve_pipeline(cfg)?;
    // traced boundary
    let grid = cfg
        .verify
        .grid
        .clone()
        .or(cfg.omega.grid.clone())
        .unwrap_or_default()
        .to_spec();
    let witnesses = trace_omega(&cfg.mu_p, &cfg.mu_q, &grid)?;
    // finite-n cloud
    let n = cfg.verify.esd_n.unwrap_or(cfg.esd.n);
    let sample = sample_spectrum(&ensemble(cfg, n, 1))?;
    eprintln!("verify: eigensolve n = {} took {:.2}s", n, sample.wall_time);

    // metric 1: witnesses vanish on the curve
    let curve_check = if curve.is_degenerate() {
        None
    } else {
        Some(verify_against_curve(&witnesses, &curve)?)
    };

    // metric 2: eigenvalue proximity to the witness set
    let proximity = cfg.verify.proximity.unwrap_or(0.05);
    let near = if witnesses.is_empty() {
        0usize
    } else {
        sample
            .eigenvalues
            .iter()
            .filter(|ev| {
                witnesses
                    .iter()
                    .map(|w| (w.z - **ev).norm())
                    .fold(f64::INFINITY, f64::min)
                    <= proximity
            })
            .count()
    };
    let near_fraction = near as f64 / sample.eigenvalues.len() as f64;

    // metric 3: two-atom hyperbola geometry when applicable
    let hyperbola = two_atom_pair(cfg).map(|pair| {
        let max_h = witnesses
            .iter()
            .map(|w| pair.hyperbola_residual(w.z).abs())
            .fold(0.0f64, f64::max);
        json!({ "max_hyperbola_residual": max_h })
    });

    // probe separation: random off-curve points score visibly nonzero
    let separation = if let (false, Some(_)) = (witnesses.is_empty(), curve.f.as_ref()) {
        let mut worst = f64::INFINITY;
        let mut s = 0x9e3779b97f4a7c15u64.wrapping_add(cfg.seed);
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        let span = 2.0 * (cfg.mu_p.sup_norm() + cfg.mu_q.sup_norm()).max(1.0);
        let mut count = 0;
        while count < 50 {
            let z = Complex64::new((next() - 0.5) * span, (next() - 0.5) * span);
            let d = witnesses
                .iter()
                .map(|w| (w.z - z).norm())
                .fold(f64::INFINITY, f64::min);
            if d < 0.1 {
                continue;
            }
            count += 1;
            if let Ok(score) = normalized_score(&curve, z) {
                worst = worst.min(score);
            }
        }
        Some(worst)
    } else {
        None
    };

    let report = json!({
        "config": cfg.echo,
        "witness_count": witnesses.len(),
        "curve_degenerate": curve.is_degenerate(),
        "max_curve_score_at_witnesses": curve_check.as_ref().map(|c| c.max_score),
        "mean_curve_score_at_witnesses": curve_check.as_ref().map(|c| c.mean_score),
        "esd_n": n,
        "eigenvalue_proximity_tol": proximity,
        "eigenvalues_near_boundary_fraction": near_fraction,
        "min_offcurve_probe_score": separation,
        "two_atom_check": hyperbola,
    });
    write_json(out, "verify_report.json", &report)?;

    let overlay = Overlay {
        eigenvalues: &sample.eigenvalues,
        witnesses: &witnesses,
        curve: curve.f.as_ref().map(|_| &curve),
    };
    write_bytes(out, "overlay.svg", overlay.render().as_bytes())?;

    // smoke the plotted field once so a broken curve cannot silently render
    if let Some(f) = &curve.f {
        let _ = curve_eval(&curve, Complex64::new(0.0, 0.0));
        let _ = f.total_degree();
    }
    Ok(EXIT_OK)
}
