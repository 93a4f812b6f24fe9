use anyhow::{bail, Result};

use slope_core::adelic::pushforward_toric;
use slope_core::axioms::check_axioms;
use slope_core::filtration::hn_cross_check;
use slope_core::graded::{compositions, Section};
use slope_core::rational::format_rational;
use slope_core::toric::{cone_scan, to_multigraded_series, vol_i_extension};
use slope_core::{Error, ExtRational, Rational};

use crate::config::{rational, rationals, World};
use crate::report::Report;

fn point_label(m: &[i64]) -> String {
    format!("({})", m.iter().map(i64::to_string).collect::<Vec<_>>().join(";"))
}

fn rational_point_label(x: &[Rational]) -> String {
    format!("({})", x.iter().map(format_rational).collect::<Vec<_>>().join(";"))
}

fn degree_label(a: &[u32]) -> String {
    format!("[{}]", a.iter().map(u32::to_string).collect::<Vec<_>>().join(";"))
}

pub fn slopes(world: &World) -> Result<Report> {
    let mut r = Report::default();
    for (i, space) in world.spaces.iter().enumerate() {
        let note = format!("space {i}");
        let p = space.slope_profile();
        r.push("dim", None, space.dim(), note.clone());
        for (k, s) in p.slopes.iter().enumerate() {
            r.push("slope", Some((k + 1).to_string()), s, note.clone());
        }
        r.push("degree", None, &p.degree, note.clone());
        r.push("positive_degree", None, &p.positive_degree, note.clone());
        r.push("mu_min", None, p.mu_min, note.clone());
        r.push("mu_max", None, p.mu_max, note.clone());
        let check = hn_cross_check(space, None);
        r.push("hn_subspaces_checked", None, check.subspaces_checked, note.clone());
        for v in check.violations {
            r.violation("violation:hn_maximality", None, v, note.clone());
        }
    }
    if let (Some(n), Ok((name, d))) = (world.params().n_max, world.main_divisor()) {
        let note = format!("pushforward of {name}");
        let bundle = pushforward_toric(d, n as u64);
        let hn = bundle.hn_sorted();
        for (k, s) in hn.slopes.iter().enumerate() {
            r.push("slope", Some((k + 1).to_string()), s, note.clone());
        }
        r.push("degree", Some(n.to_string()), bundle.total_degree(), note.clone());
        let series = d.to_series().series_space(&[n])?.slope_profile().slopes;
        if series != hn.slopes {
            r.violation("violation:pushforward_vs_series", Some(n.to_string()), false, note);
        }
    }
    if r.rows.is_empty() {
        bail!("slopes needs spaces or a divisor with params.n_max");
    }
    Ok(r)
}

pub fn series_invariants(world: &World) -> Result<Report> {
    let p = world.params();
    let s = world.main_series()?;
    let n_max = World::require(&p.n_max, "n_max")?;
    let mut r = Report::default();
    let inv = s.asymptotic_invariants(n_max, &world.tolerance()?)?;
    for t in &inv.traces {
        r.indexed("mu_max_over_n", t.n, t.mu_max_over_n.clone());
        r.indexed("mu_min_over_n", t.n, t.mu_min_over_n.clone());
    }
    r.scalar("tail_start", inv.tail_start);
    r.scalar("mu_max_asy", inv.mu_max_asy);
    r.scalar("mu_min_inf", inv.mu_min_inf);
    r.scalar("mu_min_sup", inv.mu_min_sup);
    match inv.oscillation {
        Some(o) => r.scalar("tail_oscillation", o),
        None => r.scalar("tail_oscillation", "unbounded"),
    }
    r.scalar("converged", inv.converged);

    let sa_max = p.superadd_n_max.unwrap_or(n_max.min(8));
    let report = s.check_superadditivity(sa_max, p.factor_count_max.unwrap_or(2))?;
    r.scalar("superadd_n_max", sa_max);
    r.scalar("superadd_tuples_checked", report.tuples_checked);
    if let Some(w) = &report.worst_slack {
        r.scalar("superadd_worst_slack", w);
    }
    for v in &report.violations {
        let witness = format!(
            "degrees={} monomials={} lhs={} rhs={}",
            v.degrees.iter().map(|a| degree_label(a)).collect::<Vec<_>>().join(" "),
            v.monomials.iter().map(|m| point_label(m)).collect::<Vec<_>>().join(" "),
            v.lhs.as_ref().map_or("missing".to_string(), format_rational),
            format_rational(&v.rhs),
        );
        let slack = v.lhs.as_ref().map(|l| l - &v.rhs);
        match slack {
            Some(x) => r.violation("violation:delta_superadditivity", None, x, witness),
            None => r.violation("violation:delta_superadditivity", None, "missing product", witness),
        }
    }

    if let Some(grid) = &p.t_grid {
        let grid = rationals(grid)?;
        let est = s.okounkov_body(n_max, &grid, p.m_max.unwrap_or(1))?;
        for (k, v) in est.body.vertices().iter().enumerate() {
            r.indexed("body_vertex", k + 1, rational_point_label(v));
        }
        for (t, hull) in &est.levels {
            let note = format!("t={}", format_rational(t));
            match hull {
                None => r.push("level_vertex", None, "empty", note),
                Some(h) => {
                    for (k, v) in h.vertices().iter().enumerate() {
                        r.push("level_vertex", Some((k + 1).to_string()), rational_point_label(v), note.clone());
                    }
                }
            }
        }
    }
    Ok(r)
}

pub fn chi_vol(world: &World) -> Result<Report> {
    let p = world.params();
    let s = world.main_series()?;
    let d = p.kodaira_dim.unwrap_or(s.ambient_dim() as u32);
    let n_list = match (&p.n_list, p.n_max) {
        (Some(l), _) => l.clone(),
        (None, Some(n)) => (1..=n).collect(),
        (None, None) => bail!("chi-vol needs params.n_list or params.n_max"),
    };
    let mut r = Report::default();
    for row in s.chi_volume_sequence(d, &n_list)? {
        r.indexed("dim", row.n, row.dim);
        r.indexed("chi_est", row.n, row.chi_est);
        r.indexed("vol_hat_est", row.n, row.vol_hat_est);
        r.indexed("vol_est", row.n, row.vol_est);
    }
    if p.series.is_none() {
        let (_, div) = world.main_divisor()?;
        r.scalar("vol", div.volume());
        r.scalar("chi_volume_oracle", div.chi_volume_oracle());
    }
    Ok(r)
}

pub fn hs_check(world: &World) -> Result<Report> {
    let p = world.params();
    let (_, d) = world.main_divisor()?;
    let n_max = World::require(&p.n_max, "n_max")?;
    let report = slope_core::toric::hilbert_samuel_check(d, n_max, &world.tolerance()?)?;
    let mut r = Report::default();
    r.scalar("chi_volume_oracle", &report.oracle);
    r.scalar("tolerance", &report.tolerance);
    for (row, gap) in report.estimates.iter().zip(&report.gaps) {
        r.indexed("chi_est", row.n, &row.chi_est);
        r.indexed("gap", row.n, gap);
    }
    r.scalar("max_gap_tail", &report.max_gap_tail);
    r.scalar("verdict", if report.pass { "pass" } else { "fail" });
    r.failed |= !report.pass;
    r.indexed("final_gap", n_max, &report.final_gap);
    Ok(r)
}

pub fn cone_scan_rows(world: &World) -> Result<Report> {
    let p = world.params();
    let divs = world.divisor_list()?;
    let grid: Vec<Vec<Rational>> =
        World::require(&p.grid, "grid")?.iter().map(|g| rationals(g)).collect::<Result<_>>()?;
    let rows = cone_scan(&divs, &grid, p.n_est.unwrap_or(0))?;
    let lambda_bound = p.lambda_bound.as_deref().map(rational).transpose()?;
    let mut r = Report::default();
    for (k, row) in rows.iter().enumerate() {
        let idx = k + 1;
        let note = rational_point_label(&row.weights);
        r.push("vol", Some(idx.to_string()), &row.vol, note.clone());
        r.push("vol_chi", Some(idx.to_string()), &row.vol_chi, note.clone());
        match &row.ratio {
            Some(x) => r.push("ratio", Some(idx.to_string()), x, note.clone()),
            None => r.push("ratio", Some(idx.to_string()), "undefined", format!("{note} flagged: zero volume")),
        }
        if let Some(c) = &row.chi_est {
            r.push("chi_est", Some(idx.to_string()), c, note.clone());
        }
        if let (Some(lb), false) = (&lambda_bound, row.flagged) {
            match vol_i_extension(&divs, &row.weights, lb) {
                Ok(v) => {
                    if v != row.vol_chi {
                        r.violation("violation:vol_i_extension", Some(idx.to_string()), &v, note.clone());
                    } else {
                        r.push("vol_i", Some(idx.to_string()), &v, note.clone());
                    }
                }
                Err(Error::Contract(msg)) => r.push("vol_i", Some(idx.to_string()), "contract", msg),
                Err(e) => return Err(e.into()),
            }
        }
    }
    let mut checked = 0usize;
    let two = Rational::from_integer(2.into());
    for i in 0..rows.len() {
        for k in i + 1..rows.len() {
            let mid: Vec<Rational> = rows[i].weights.iter().zip(&rows[k].weights).map(|(a, b)| (a + b) / &two).collect();
            for j in 0..rows.len() {
                if rows[j].weights != mid {
                    continue;
                }
                let (Some(ri), Some(rj), Some(rk)) = (&rows[i].ratio, &rows[j].ratio, &rows[k].ratio) else {
                    continue;
                };
                checked += 1;
                let rhs = (ri + rk) / &two;
                if *rj < rhs {
                    r.violation(
                        "violation:ratio_midpoint_concavity",
                        Some((j + 1).to_string()),
                        rj - &rhs,
                        format!("endpoints {} and {}", i + 1, k + 1),
                    );
                }
            }
        }
    }
    r.scalar("midpoint_triples_checked", checked);
    Ok(r)
}

pub fn certificate(world: &World) -> Result<Report> {
    let p = world.params();
    let generator_degree = p.generator_degree.unwrap_or(1);
    let offset = rational(p.offset.as_deref().unwrap_or("0"))?;
    let mut r = Report::default();
    let (series, multi) = match &p.divisors {
        Some(_) => {
            let multi = to_multigraded_series(&world.divisor_list()?)?;
            (multi.bundle_sum_series(), Some(multi))
        }
        None => (world.main_series()?, None),
    };
    let n_check = World::require(&p.n_check, "n_check")?;
    let cert = series.slope_certificate(generator_degree, n_check, &offset)?;
    r.scalar("S", &cert.s);
    r.scalar("T", &cert.t);
    r.scalar("generator_degree", cert.generator_degree);
    r.scalar("verified_up_to", cert.verified_up_to);
    r.scalar("valid", cert.valid);
    r.failed |= !cert.valid;
    for (n, mu, bound) in &cert.failures {
        r.violation("violation:min_slope_bound", Some(n.to_string()), mu - bound, format!("mu_min={} bound={}", format_rational(mu), format_rational(bound)));
    }
    if let Some(multi) = multi {
        let total_max = World::require(&p.total_max, "total_max")?;
        let failures = cert.verify_multigraded(&multi, total_max)?;
        let count: usize = (1..=total_max).map(|m| compositions(m, multi.grading_rank()).len()).sum();
        r.scalar("multidegrees_checked", count);
        for (a, mu, bound) in failures {
            r.violation("violation:multigraded_min_slope_bound", None, &mu - &bound, degree_label(&a));
        }
    }
    Ok(r)
}

pub fn fekete(world: &World) -> Result<Report> {
    let p = world.params();
    let s = world.main_series()?;
    let m_max = p.m_max.unwrap_or(16);
    let monomials: Vec<(Vec<u32>, Vec<i64>)> = match &p.monomials {
        Some(list) => list.iter().map(|m| (m.degree.clone(), m.point.clone())).collect(),
        None => {
            if s.grading_rank() != 1 {
                bail!("params.monomials is required for multigraded series");
            }
            let mut out = Vec::new();
            for n in 1..=p.n_max.unwrap_or(4) {
                out.extend(s.piece(&[n])?.into_iter().map(|(m, _)| (vec![n], m)));
            }
            out
        }
    };
    let mut r = Report::default();
    r.scalar("m_max", m_max);
    let exact = s.superadd_constant() == &Rational::from_integer(0.into());
    for (deg, m) in monomials {
        let note = format!("{} {}", degree_label(&deg), point_label(&m));
        let sec = Section::monomial(deg, m);
        let lambda = match s.section_lambda(&sec)? {
            ExtRational::Finite(x) => x,
            _ => bail!("monomial {note} has no finite λ"),
        };
        let est = s.fekete_lambda(&sec, m_max)?;
        r.push("lambda", None, &lambda, note.clone());
        r.push("lambda_prime", None, &est.estimate, note.clone());
        r.push("upper_info", None, &est.upper_info, note.clone());
        if exact && est.estimate < lambda {
            r.violation("violation:asymptotic_norm_dominates", None, &est.estimate - &lambda, note);
        }
    }
    Ok(r)
}

pub fn axioms(world: &World, seed: u64) -> Result<Report> {
    let p = world.params();
    let report = check_axioms(seed, p.samples.unwrap_or(100), p.dim_max.unwrap_or(6));
    let mut r = Report::default();
    r.scalar("seed", seed);
    r.scalar("samples", report.samples);
    for (axiom, count) in &report.checks {
        r.push("checked", None, *count, *axiom);
    }
    for f in &report.failures {
        r.violation(&format!("violation:{}", f.axiom), Some(f.sample.to_string()), f.detail.clone(), "");
    }
    r.scalar("passed", report.passed());
    Ok(r)
}
