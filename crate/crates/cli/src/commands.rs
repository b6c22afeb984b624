//! Subcommand implementations.

use std::fs;

use serde::Serialize;
use serde_json::json;

use charfol::chart;
use charfol::construction::{ModelData, ReducedSystem};
use charfol::contact::{tb_evaluate, ContactData, TangencyKind, TangencyRecord, TangencySign, TbReport, Verdict};
use charfol::coords::CoordSystem;
use charfol::dsl;
use charfol::dynamics::{self, NumericSystem};
use charfol::ledger;
use charfol::real::Ctx;

use crate::analysis::{analyze_model, analyze_zeros, Analysis};
use crate::opts::{EngineArgs, PortraitArgs, SingularArgs, TbArgs, VerifyArgs};
use crate::svg::{render, PortraitSpec};
use crate::{CliError, EXIT_MATH, EXIT_OK};

fn write_json(path: &Option<std::path::PathBuf>, doc: &serde_json::Value) -> Result<(), CliError> {
    if let Some(path) = path {
        let mut text = serde_json::to_string_pretty(doc)
            .map_err(|e| CliError::math(format!("json serialization: {}", e)))?;
        text.push('\n');
        fs::write(path, text)?;
    }
    Ok(())
}

pub fn cmd_verify(args: VerifyArgs) -> Result<i32, CliError> {
    let cfg = args.common.validate(true)?;
    let ctx = Ctx::new(cfg.precision);
    let mut obj = ModelData::build(cfg.n)?;
    if let Some(token) = &args.mutate {
        obj.apply_mutation(token)
            .map_err(|e| CliError::usage(e.to_string()))?;
    }
    let entries = ledger::run_ledger(&obj, &cfg.eps, &ctx)?;

    println!(
        "verification ledger  (n = {}, eps = {}, precision = {} digits{})",
        cfg.n,
        cfg.eps_str,
        cfg.precision,
        args.mutate
            .as_deref()
            .map(|m| format!(", mutation = {}", m))
            .unwrap_or_default()
    );
    let mut all_pass = true;
    for e in &entries {
        all_pass &= e.passed();
        println!("  [{}] {:<24} {}", if e.passed() { "pass" } else { "FAIL" }, e.name, e.paper_anchor);
        if !e.passed() {
            for t in &e.residual_terms {
                println!("         residual: {}", t);
            }
        }
    }
    println!(
        "{} of {} identities verified",
        entries.iter().filter(|e| e.passed()).count(),
        entries.len()
    );

    let doc = json!({
        "schema": 1,
        "n": cfg.n,
        "eps": cfg.eps_str,
        "precision": cfg.precision,
        "mutation": args.mutate,
        "entries": entries,
    });
    write_json(&cfg.json, &doc)?;
    Ok(if all_pass { EXIT_OK } else { EXIT_MATH })
}

fn print_rows(analysis: &Analysis) {
    println!(
        "{:>14} {:>12} {:>12}  {:<10} {:>5}  {:<4} {:>12}",
        "z", "r", "rho", "kind", "index", "sign", "C"
    );
    for row in &analysis.rows {
        println!(
            "{:>14.10} {:>12.10} {:>12.10}  {:<10} {:>5}  {:<4} {:>12}",
            row.z,
            row.r,
            row.rho,
            row.kind,
            row.index,
            row.sign.as_deref().unwrap_or("-"),
            row.c
                .map(|c| format!("{:.8}", c))
                .unwrap_or_else(|| "-".to_string()),
        );
    }
}

pub fn cmd_singular(args: SingularArgs) -> Result<i32, CliError> {
    let cfg = args.common.validate(true)?;
    let ctx = Ctx::new(cfg.precision);
    let analysis = analyze_model(cfg.n, &cfg.eps, &ctx)?;
    println!(
        "singular points of the reduced foliation  (eps = {}, n = {})",
        cfg.eps_str, cfg.n
    );
    print_rows(&analysis);

    let doc = json!({
        "schema": 1,
        "n": cfg.n,
        "eps": cfg.eps_str,
        "c_sep": analysis.c_sep,
        "points": analysis.rows,
    });
    write_json(&cfg.json, &doc)?;
    Ok(EXIT_OK)
}

#[derive(serde::Deserialize)]
struct RecordInput {
    sign: String,
    index: i64,
    kind: String,
}

fn parse_records(src: &str) -> Result<Vec<TangencyRecord>, CliError> {
    let text = if std::path::Path::new(src).exists() {
        fs::read_to_string(src)?
    } else {
        src.to_string()
    };
    let inputs: Vec<RecordInput> = serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("bad --records JSON: {}", e)))?;
    let mut out = Vec::new();
    for r in inputs {
        let mut rec = TangencyRecord::new(vec![]);
        rec.sign = Some(match r.sign.as_str() {
            "+" => TangencySign::Plus,
            "-" => TangencySign::Minus,
            other => return Err(CliError::usage(format!("bad sign `{}`", other))),
        });
        rec.index = Some(r.index);
        rec.kind = Some(match r.kind.as_str() {
            "source" => TangencyKind::Source,
            "sink" => TangencyKind::Sink,
            "saddle" => TangencyKind::Saddle,
            "rotational" => TangencyKind::Rotational,
            other => return Err(CliError::usage(format!("bad kind `{}`", other))),
        });
        out.push(rec);
    }
    Ok(out)
}

fn print_tb(report: &TbReport) {
    println!("  sum over S_- of Ind = {}", report.sum_minus);
    println!("  sum over S_+ of Ind = {}", report.sum_plus);
    println!(
        "  relative Euler number <e(ker alpha), [Sigma, dSigma]> = {} - {} = {}",
        report.sum_plus, report.sum_minus, report.euler_rel
    );
    match report.verdict {
        Verdict::Violated => println!(
            "  inequality sum_(S-) Ind <= 0 is VIOLATED: {} > 0",
            report.sum_minus
        ),
        Verdict::Holds => println!(
            "  inequality sum_(S-) Ind <= 0 holds: {} <= 0",
            report.sum_minus
        ),
    }
    println!(
        "  comparison with -chi: -<e> = {} {} -chi = {}",
        -report.euler_rel,
        if -report.euler_rel > -report.chi { ">" } else { "<=" },
        -report.chi
    );
}

pub fn cmd_tb(args: TbArgs) -> Result<i32, CliError> {
    let cfg = args.common.validate(true)?;
    let report = if let Some(records_src) = &args.records {
        let records = parse_records(records_src)?;
        println!("TB report over supplied records (chi = {})", args.chi);
        tb_evaluate(&records, args.chi)?
    } else {
        let ctx = Ctx::new(cfg.precision);
        let analysis = analyze_model(cfg.n, &cfg.eps, &ctx)?;
        println!(
            "TB report for the construction  (eps = {}, n = {}, chi = {})",
            cfg.eps_str, cfg.n, args.chi
        );
        tb_evaluate(&analysis.records, args.chi)?
    };
    print_tb(&report);

    let doc = json!({
        "schema": 1,
        "eps": cfg.eps_str,
        "n": cfg.n,
        "sum_minus": report.sum_minus,
        "sum_plus": report.sum_plus,
        "euler_rel": report.euler_rel,
        "chi": report.chi,
        "verdict": report.verdict,
    });
    write_json(&cfg.json, &doc)?;
    Ok(EXIT_OK)
}

pub fn cmd_portrait(args: PortraitArgs) -> Result<i32, CliError> {
    let cfg = args.common.validate(true)?;
    let ctx = Ctx::new(cfg.precision);
    let analysis = analyze_model(cfg.n, &cfg.eps, &ctx)?;
    let markers: Vec<[f64; 3]> = analysis.rows.iter().map(|r| [r.z, r.r, r.rho]).collect();
    let spec = PortraitSpec {
        eps: charfol::real::scalar_to_f64(&cfg.eps),
        c_sep: analysis.c_sep,
        leaves: args.leaves,
        size: args.size,
        markers,
    };
    let portrait = render(&spec);
    if portrait.max_leaf_residual > 1e-6 {
        return Err(CliError::math(format!(
            "leaf sampling residual {} exceeds 1e-6",
            portrait.max_leaf_residual
        )));
    }
    fs::write(&args.out, &portrait.svg)?;
    println!(
        "portrait written to {} ({} leaves + separatrix, {} singular markers, max leaf residual {:.2e})",
        args.out.display(),
        portrait.leaf_values.len(),
        analysis.rows.len(),
        portrait.max_leaf_residual
    );

    let doc = json!({
        "schema": 1,
        "eps": cfg.eps_str,
        "n": cfg.n,
        "svg": args.out.display().to_string(),
        "size": args.size,
        "c_sep": analysis.c_sep,
        "leaves": portrait.leaf_values,
        "markers": analysis.rows,
        "separatrix_samples": portrait.separatrix_samples,
        "max_leaf_residual": portrait.max_leaf_residual,
        "transform": portrait.transform,
    });
    write_json(&cfg.json, &doc)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct MembershipDoc {
    beta_x_zero: bool,
    df_x_zero: bool,
    span_membership_zero: bool,
}

pub fn cmd_engine(args: EngineArgs) -> Result<i32, CliError> {
    let cfg = args.common.validate(false)?;
    let names: Vec<&str> = args.coords.split(',').map(|s| s.trim()).collect();
    if names.len() % 2 == 0 || names.len() < 3 {
        return Err(CliError::usage(
            "--coords needs an odd number (>= 3) of names",
        ));
    }
    let coords = CoordSystem::new(&names).map_err(|e| CliError::usage(e.to_string()))?;
    let n = (coords.len() - 1) / 2;

    let beta = dsl::parse_one_form(&args.beta, &coords)?;
    let f = dsl::parse_poly(&args.f, &coords)?;
    let data = ContactData::new(n, beta, f)?;
    let volume = data.contact_check()?;
    let x = data.characteristic_field()?;
    println!("characteristic field:");
    println!("  X = {}", x);
    println!("contact volume coefficient: {}", volume);

    let (beta_x, df_x, wedge) = data.membership_residuals(&x)?;
    let membership = MembershipDoc {
        beta_x_zero: beta_x.is_zero(),
        df_x_zero: df_x.is_zero(),
        span_membership_zero: wedge.is_zero(),
    };
    println!(
        "membership checks: beta(X) = 0: {}, dF(X) = 0: {}, i_X dbeta in span(beta, dF) mod F: {}",
        membership.beta_x_zero, membership.df_x_zero, membership.span_membership_zero
    );
    let ok = membership.beta_x_zero && membership.df_x_zero && membership.span_membership_zero;

    let mut doc = json!({
        "schema": 1,
        "coords": args.coords,
        "n": n,
        "field": x.to_string(),
        "volume_coefficient": volume.to_string(),
        "membership": membership,
    });

    if args.dynamics {
        match engine_dynamics(&data, &x, &cfg.eps, cfg.precision, args.chi) {
            Ok(section) => {
                doc["dynamics"] = section;
            }
            Err(e) => {
                println!("dynamics pipeline unavailable: {}", e.message);
                doc["dynamics"] = json!({ "unavailable": e.message });
            }
        }
    }

    write_json(&cfg.json, &doc)?;
    Ok(if ok { EXIT_OK } else { EXIT_MATH })
}

/// The optional singularity/TB pipeline of engine mode: requires the
/// rotational reduction of the computed field to exist.
fn engine_dynamics(
    data: &ContactData,
    x: &charfol::field::VecField,
    eps: &charfol::scalar::Scalar,
    precision: usize,
    chi: i64,
) -> Result<serde_json::Value, CliError> {
    let coords = data.coords();
    let sys = ReducedSystem::from_field(coords, x).map_err(CliError::from)?;
    let ns = NumericSystem::new(&sys, eps)?;
    let ctx = Ctx::new(precision);
    let zeros = dynamics::find_zeros(&ns, &ctx)?;
    println!("reduced field has {} singular points on the quarter-sphere", zeros.len());

    // Tangency signs live in the Cartesian chart.
    let n = data.n();
    let cart_cs = CoordSystem::cartesian_jet(n);
    let beta_cart = chart::one_form_to_cartesian(data.beta(), &cart_cs)?;
    let f_cart = chart::poly_to_cartesian(data.f(), &cart_cs)?;
    let cart = ContactData::new(n, beta_cart, f_cart)?;
    let orientation = cart.induced_orientation_form()?;
    let analysis = analyze_zeros(&ns, &ctx, zeros, Some((&cart, &orientation)), eps, n)?;
    print_rows(&analysis);

    let report = tb_evaluate(&analysis.records, chi)?;
    println!("TB count over the detected tangencies (chi = {}):", chi);
    print_tb(&report);

    Ok(json!({
        "points": analysis.rows,
        "sum_minus": report.sum_minus,
        "sum_plus": report.sum_plus,
        "euler_rel": report.euler_rel,
        "chi": report.chi,
        "verdict": report.verdict,
    }))
}
