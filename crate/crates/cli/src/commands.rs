use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use deconv_core::estimators::{bandwidth_rule, deconv_known, deconv_unknown, ecf, kde_spectrum};
use deconv_core::models::DensityModel;
use deconv_core::regularization::{bias_bound_audit, stochastic_bias_audit, threshold, ThresholdInputs};
use deconv_core::risk::{
    lower_bound_diagnostic, mise_y, moment_bound_audit, rate_fit, run_experiment, DeltaProxy, RiskReport,
};
use deconv_core::spectral::{inverse_transform_at, tail_check, NestedIntegral, SobolevWeight};
use serde_json::{json, Value};

use crate::config::Config;
use crate::error::CliError;
use crate::output::{hash_line, num, report_csv, unix_now, GridInfo, Outputs, RunManifest, BIAS_HEADER, SPECTRUM_HEADER};
use crate::plot::plot_outputs;
use crate::scenario::{self, Quantity};

/// Reads one decimal per line; `#` starts a comment.
pub fn read_samples(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    text.lines()
        .enumerate()
        .filter_map(|(i, l)| {
            let v = l.split('#').next().unwrap_or("").trim();
            (!v.is_empty()).then_some((i, v))
        })
        .map(|(i, v)| {
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::Data(format!("{}:{}: not a finite number: `{v}`", path.display(), i + 1)))
        })
        .collect()
}

fn nested_json(v: &NestedIntegral) -> Value {
    match v {
        NestedIntegral::Finite(x) => json!({ "finite": true, "value": x }),
        NestedIntegral::Divergent { partials } => json!({ "finite": false, "partials": partials }),
    }
}

fn manifest(
    hash: &str,
    command: &'static str,
    started: u64,
    seed: Option<u64>,
    grid: Option<GridInfo>,
    outputs: &Outputs,
) -> Result<String, CliError> {
    let mut names = outputs.names();
    names.push("manifest.json".into());
    let m = RunManifest {
        config_sha256: hash.to_string(),
        tool_version: env!("CARGO_PKG_VERSION"),
        command,
        started_unix: started,
        finished_unix: unix_now(),
        seed,
        grid,
        threads: rayon::current_num_threads(),
        outputs: names,
    };
    Ok(serde_json::to_string_pretty(&m)? + "\n")
}

pub fn simulate(config: &Config, out_dir: &Path) -> Result<(), CliError> {
    let started = unix_now();
    let hash = config.sha256();
    let sim = scenario::simulation(config)?;
    let exp = &sim.experiment;
    let report = match sim.quantity {
        Quantity::HsRisk => run_experiment(exp)?,
        Quantity::MiseY => RiskReport {
            cells: exp.n_schedule.iter().map(|&n| mise_y(exp, n)).collect::<Result<_, _>>()?,
            rho_sq: None,
        },
    };
    let quantity = match sim.quantity {
        Quantity::HsRisk => "hs_risk",
        Quantity::MiseY => "mise_y",
    };
    let fits: Vec<Value> = sim
        .fits
        .iter()
        .map(|&model| match rate_fit(&report, model) {
            Ok(f) => json!({
                "model": model.name(),
                "exponent": f.exponent,
                "se": f.se,
                "r_squared": f.r_squared,
                "intercept": f.intercept,
                "points": f.points,
            }),
            Err(e) => json!({ "model": model.name(), "error": e.to_string() }),
        })
        .collect();
    let x_tail = tail_check(&exp.pair.x.spectrum(exp.grid), SobolevWeight::new(exp.s)?, 1e-6)?;
    let summary = json!({
        "config_sha256": hash,
        "quantity": quantity,
        "delta_mode": sim.delta_mode.name(),
        "rho_sq": report.rho_sq.as_ref().map(nested_json),
        "tail_check": { "passed": x_tail.passed, "fraction": x_tail.fraction },
        "fits": fits,
    });
    let mut out = Outputs::default();
    out.add("report.csv", report_csv(&hash, &format!("quantity={quantity} delta_mode={}", sim.delta_mode.name()), &report.cells));
    out.add("fits.json", serde_json::to_string_pretty(&summary)? + "\n");
    let m = manifest(&hash, "simulate", started, Some(exp.seed), Some(exp.grid.into()), &out)?;
    out.add("manifest.json", m);
    out.commit(out_dir)?;
    Ok(())
}

pub fn audit(config: &Config, out_dir: &Path) -> Result<(), CliError> {
    let started = unix_now();
    let hash = config.sha256();
    let plan = scenario::audit(config)?;
    let x_cf = plan.pair.x.spectrum(plan.grid);
    let eps_cf = plan.pair.eps.spectrum(plan.grid);
    let mut out = Outputs::default();

    if let Some(cond) = &plan.source {
        let poly = matches!(cond, deconv_core::regularization::SourceCondition::Poly { .. });
        let mut bias = hash_line(&hash);
        let _ = writeln!(bias, "# source={cond}");
        bias.push_str(BIAS_HEADER);
        bias.push_str(if poly { ",holds\n" } else { "\n" });
        for &alpha in &plan.alphas {
            let a = bias_bound_audit(&x_cf, &eps_cf, plan.s, alpha, cond)?;
            let _ = write!(bias, "{},{},{},{},{}", num(a.alpha), num(a.lhs), num(a.rho_sq), num(a.rate), num(a.ratio));
            match a.holds {
                Some(h) => {
                    let _ = writeln!(bias, ",{h}");
                }
                None => bias.push('\n'),
            }
        }
        out.add("bias.csv", bias);

        let mut st = hash_line(&hash);
        st.push_str("m,alpha,lhs_mc,se,rate,rho_sq,ratio\n");
        for &m in &plan.m_schedule {
            for r in stochastic_bias_audit(&x_cf, &plan.pair.eps, plan.s, cond, &plan.alphas, m, plan.stochastic_replicates, plan.seed)? {
                let _ = writeln!(st, "{m},{},{},{},{},{},{}", num(r.alpha), num(r.lhs_mc), num(r.se), num(r.rate), num(r.rho_sq), num(r.ratio));
            }
        }
        out.add("stochastic_bias.csv", st);
    }

    let mut mo = hash_line(&hash);
    mo.push_str("t,m,gamma,scaled,se,exact\n");
    for r in moment_bound_audit(&plan.pair.eps, &plan.probes, &plan.m_schedule, &plan.gammas, plan.moment_replicates, plan.seed)? {
        let exact = r.exact.map(num).unwrap_or_default();
        let _ = writeln!(mo, "{},{},{},{},{},{exact}", num(r.t), r.m, num(r.gamma), num(r.scaled), num(r.se));
    }
    out.add("moments.csv", mo);

    let mut lb = hash_line(&hash);
    let _ = writeln!(lb, "# kappa={}", plan.kappa);
    lb.push_str("m,value,argmax_t\n");
    for &m in &plan.m_schedule {
        let d = lower_bound_diagnostic(&eps_cf, &plan.kappa, m)?;
        let _ = writeln!(lb, "{m},{},{}", num(d.value), num(d.argmax_t));
    }
    out.add("lower_bound.csv", lb);

    let m = manifest(&hash, "audit", started, Some(plan.seed), Some(plan.grid.into()), &out)?;
    out.add("manifest.json", m);
    out.commit(out_dir)?;
    Ok(())
}

pub enum ErrorSource<'a> {
    Known(DensityModel),
    Sample(&'a Path),
}

pub fn estimate(config: &Config, y_path: &Path, eps: ErrorSource<'_>, out_dir: &Path) -> Result<(), CliError> {
    let started = unix_now();
    let hash = config.sha256();
    let plan = scenario::estimate(config)?;
    let y = read_samples(y_path)?;
    if y.is_empty() {
        return Err(deconv_core::DeconvError::EmptySample.into());
    }
    let n = y.len();
    let h = bandwidth_rule(n, plan.bandwidth.r, plan.bandwidth.c)?;
    let y_hat = kde_spectrum(&y, plan.kernel, h, plan.grid)?;
    let delta = DeltaProxy::theoretical(n, plan.bandwidth.r);
    let mut inputs = ThresholdInputs { delta: Some(delta), n: Some(n), s: Some(plan.s), r: Some(plan.bandwidth.r), ..plan.inputs.clone() };
    let (est, m) = match eps {
        ErrorSource::Known(model) => {
            let alpha = threshold(&plan.rule, &inputs)?;
            (deconv_known(&y_hat, &model.spectrum(plan.grid), plan.s, alpha)?, None)
        }
        ErrorSource::Sample(path) => {
            let draws = read_samples(path)?;
            let e = ecf(&draws, plan.grid)?;
            inputs.m = Some(e.m);
            let alpha = threshold(&plan.rule, &inputs)?;
            (deconv_unknown(&y_hat, &e, plan.s, alpha)?, Some(e.m))
        }
    };
    let fhat = inverse_transform_at(&est.spectrum, &plan.x_points)?;
    let tail = tail_check(&est.spectrum, SobolevWeight::new(plan.s)?, 1e-6)?;

    let mut spec = hash_line(&hash);
    spec.push_str(SPECTRUM_HEADER);
    spec.push('\n');
    let g = plan.grid;
    for (j, v) in est.spectrum.values().iter().enumerate() {
        let _ = writeln!(spec, "{},{},{},{}", num(g.node(j)), num(v.re), num(v.im), u8::from(est.keep_mask[j]));
    }
    let mut rec = hash_line(&hash);
    rec.push_str("x,fhat\n");
    for (x, f) in plan.x_points.iter().zip(&fhat) {
        let _ = writeln!(rec, "{},{}", num(*x), num(*f));
    }
    let meta = json!({
        "config_sha256": hash,
        "rule": plan.rule.id.name(),
        "rule_c": plan.rule.c,
        "alpha": est.alpha,
        "s": est.s,
        "delta_mode": "theoretical",
        "delta": delta,
        "n": n,
        "m": m,
        "bandwidth": h,
        "kernel": plan.kernel.name(),
        "provenance": est.provenance.to_string(),
        "mask_fraction": est.mask_fraction(),
        "interval_edge": est.interval_edge(),
        "tail_check": { "passed": tail.passed, "fraction": tail.fraction },
    });
    let mut out = Outputs::default();
    out.add("spectrum.csv", spec);
    out.add("reconstruction.csv", rec);
    out.add("estimate.json", serde_json::to_string_pretty(&meta)? + "\n");
    let mf = manifest(&hash, "estimate", started, None, Some(plan.grid.into()), &out)?;
    out.add("manifest.json", mf);
    out.commit(out_dir)?;
    Ok(())
}

pub fn plotdata(report: &Path, out_dir: &Path, with_svg: bool) -> Result<(), CliError> {
    let text = fs::read_to_string(report).map_err(|e| CliError::Data(format!("{}: {e}", report.display())))?;
    plot_outputs(&text, with_svg)?.commit(out_dir)?;
    Ok(())
}
