use std::fmt::Write as _;
use std::io::Write as _;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use hfl::germ::Germ;
use hfl::hecke_moduli::{
    atlas, canonicalize, chart_image, charts, contains, even_degeneration_type, even_extension_datum,
    even_higgs_divisor, even_twist_orders, u_coordinate, ChartId, EvenHeckeParam, HeckeParam, Stratum,
};
use hfl::local_higgs::{
    default_trunc, eigen_twist_orders, hecke_higgs, normal_form, vanishing_divisor, GermMatrix2, LocalHiggsData,
};
use hfl::oracle::run_suite;
use hfl::strata::{
    count_real_points, degeneration_poset, double_zero_total, enumerate_strata, odd_profile_total,
    single_even_zero_forms, strata_report, total_real_points, QDProfile,
};
use hfl::wps::weights_label;

#[derive(Parser, Debug)]
#[command(name = "hfl", version, about = "Singular Hitchin fibre toolkit: strata, Hecke parameters, local normal forms")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Dot,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Enumerate the strata of the fibre over a zero profile.
    Strata {
        #[arg(long)]
        genus: u32,
        /// Zero orders, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        zeros: Vec<u32>,
        /// Emit the degeneration poset as DOT.
        #[arg(long)]
        dot: bool,
        /// Whether the differential is asserted to have no global square root.
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        assume_no_global_sqrt: bool,
    },
    /// Canonical form, coordinates and chart images of a Hecke parameter.
    Canon {
        #[arg(long)]
        d: i64,
        /// Germ `v=<val>;t=<trunc>;c0,c1,...` or a bare rational.
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        /// Treat `d` as the window `m` of an even zero.
        #[arg(long)]
        even: bool,
    },
    /// Dump the invariant-polynomial charts for odd order `d`.
    HeckAtlas {
        #[arg(long)]
        d: i64,
    },
    /// Normal form of a local Higgs field, or the Higgs field of a Hecke
    /// transformation when `--a`/`--b` are given.
    Higgs {
        /// Four bracketed germs `[m11];[m12];[m21];[m22]`.
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long)]
        lambda: Option<i64>,
        #[arg(long)]
        d: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<String>,
    },
    /// Real points per stratum and in total.
    Realpoints {
        #[arg(long)]
        genus: u32,
        #[arg(long, value_delimiter = ',', required = true)]
        zeros: Vec<u32>,
    },
    /// Run a seeded property suite.
    Oracle {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        cases: usize,
    },
}

struct Output {
    json: Value,
    text: String,
    dot: Option<String>,
    code: u8,
}

fn usage(msg: impl std::fmt::Display) -> String {
    format!("error: {msg}")
}

fn to_json<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

/// Default window, overridable through `HFL_TRUNC`.
fn trunc_or(default: i64) -> Result<i64, String> {
    match std::env::var("HFL_TRUNC") {
        Ok(s) => s.trim().parse::<i64>().map_err(|e| usage(format!("HFL_TRUNC: {e}"))),
        Err(_) => Ok(default),
    }
}

fn profile(genus: u32, zeros: Vec<u32>, assume: bool) -> Result<QDProfile, String> {
    QDProfile::new(genus, zeros, assume).map_err(usage)
}

fn run_strata(genus: u32, zeros: Vec<u32>, assume: bool) -> Result<Output, String> {
    let p = profile(genus, zeros, assume)?;
    let report = strata_report(&p);
    let mut text = String::new();
    let n = &report.numerology;
    writeln!(text, "genus {} zeros {:?}", p.genus, p.mults).unwrap();
    writeln!(
        text,
        "n_odd {} n_even {} spectral genus {} prym dim {}{}",
        n.n_odd,
        n.n_even,
        n.spectral_genus,
        n.prym_dim,
        if n.unbranched { " (unbranched)" } else { "" }
    )
    .unwrap();
    writeln!(text, "{:<16} {:>4} {:>4} {:>5} {:>3} {:>3} {:>12}", "D", "deg", "dim", "prym", "r1", "r2", "real").unwrap();
    for s in &report.strata {
        let d: Vec<String> = s.divisor.coeffs.iter().map(u32::to_string).collect();
        let real = s.real_points.as_ref().map_or("-".to_string(), |x| x.to_string());
        writeln!(
            text,
            "{:<16} {:>4} {:>4} {:>5} {:>3} {:>3} {:>12}",
            format!("({})", d.join(",")),
            s.deg,
            s.dim,
            s.prym_dim,
            s.r1,
            s.r2,
            real
        )
        .unwrap();
    }
    if let Some(c) = &report.classification {
        writeln!(text, "components: {} ({})", c.components, c.note).unwrap();
    }
    writeln!(text, "fibre: {}", report.global_fibre.summary).unwrap();
    for w in &report.warnings {
        writeln!(text, "warning: {w}").unwrap();
    }
    Ok(Output { json: to_json(&report), text, dot: Some(degeneration_poset(&p).to_dot()), code: 0 })
}

fn chart_images(p: &HeckeParam) -> Vec<Value> {
    charts(p.d())
        .into_iter()
        .filter(|&c| !matches!(c, ChartId::V { .. }) && contains(c, p))
        .filter_map(|c| chart_image(c, p).ok().map(|y| json!({"chart": c.to_string(), "space": weights_label(y.weights()), "image": y})))
        .collect()
}

fn run_canon(d: i64, a: &str, b: &str, even: bool) -> Result<Output, String> {
    let t = trunc_or(d)?;
    let ga = Germ::parse(a, t).map_err(usage)?;
    let gb = Germ::parse(b, t).map_err(usage)?;
    if even {
        let p = EvenHeckeParam::new(d, ga, gb).map_err(usage)?;
        let datum = even_extension_datum(&p);
        let json = json!({
            "m": d,
            "param": p,
            "zero_class": p.is_zero_class(),
            "degeneration": even_degeneration_type(&p).ok(),
            "twist_orders": even_twist_orders(&p).ok(),
            "higgs_divisor": even_higgs_divisor(&p).ok(),
            "extension_datum": datum.as_ref().ok(),
            "datum_branch": if datum.is_ok() { "extension" } else { "eigenline twist" },
            "formulas": ["datum = (b + a)/(b - a) mod z^m", "type = (n, ord(b - a) - n, ord(b + a) - n)"],
        });
        let mut text = format!("even zero, m = {d}: a = {}, b = {}\n", p.a, p.b);
        match (&datum, even_degeneration_type(&p)) {
            (Ok(c), _) => writeln!(text, "extension datum {c}").unwrap(),
            (Err(_), Ok(ty)) => {
                writeln!(text, "eigenline twist: n={} l+={} l-={}", ty.n, ty.l_plus, ty.l_minus).unwrap()
            }
            (Err(e), Err(_)) => writeln!(text, "{e}").unwrap(),
        }
        return Ok(Output { json, text, dot: None, code: 0 });
    }
    if d % 2 == 0 {
        return Err(usage(format!("d = {d} is even; use --even for even zeros")));
    }
    let p = HeckeParam::new(d, ga, gb).map_err(usage)?;
    let c = canonicalize(&p);
    let u = u_coordinate(&p).ok();
    let stratum = match p.stratum() {
        Stratum::V(n) if n == (d - 1) / 2 => "bottom stratum point".to_string(),
        Stratum::V(n) => format!("V{n}"),
        Stratum::Zero => "zero class".to_string(),
    };
    let images = chart_images(&p);
    let json = json!({
        "d": d,
        "param": p,
        "n": p.n(),
        "stratum": stratum,
        "canonical": c,
        "u": u.as_ref().map(|v| v.iter().map(|x| x.to_string()).collect::<Vec<_>>()),
        "charts": images,
        "formulas": ["n = min(ord a, ord b)", "u = a/b (n even) or b/a (n odd) mod z^(d-2n)"],
    });
    let mut text = format!("d = {d}: {stratum}\ncanonical form {c}\n");
    if let Some(u) = &u {
        let s: Vec<String> = u.iter().map(|x| x.to_string()).collect();
        writeln!(text, "u = ({})", s.join(", ")).unwrap();
    }
    for v in &images {
        writeln!(text, "chart {}: {}", v["chart"].as_str().unwrap(), chart_text(&v["image"])).unwrap();
    }
    Ok(Output { json, text, dot: None, code: 0 })
}

fn chart_text(img: &Value) -> String {
    let norm = img["normalized"].as_array().or(img["coords"].as_array()).cloned().unwrap_or_default();
    let s: Vec<&str> = norm.iter().filter_map(Value::as_str).collect();
    format!("({})", s.join(" : "))
}

fn run_atlas(d: i64) -> Result<Output, String> {
    if d < 1 || d % 2 == 0 {
        return Err(usage(format!("d = {d} must be odd and positive")));
    }
    let entries = atlas(d).map_err(usage)?;
    let mut text = String::new();
    let mut rows = Vec::new();
    for e in &entries {
        let gens: Vec<String> = e.generators.iter().map(|g| g.render(&e.vars)).collect();
        writeln!(text, "{} -> {}: ({})", e.chart, weights_label(&e.weights), gens.join(" : ")).unwrap();
        rows.push(json!({
            "chart": e.chart.to_string(),
            "weights": e.weights,
            "vars": e.vars,
            "generators": gens,
        }));
    }
    Ok(Output { json: json!({"d": d, "charts": rows}), text, dot: None, code: 0 })
}

fn run_higgs(
    matrix: Option<String>,
    lambda: Option<i64>,
    d: Option<i64>,
    a: Option<String>,
    b: Option<String>,
) -> Result<Output, String> {
    match (matrix, lambda, d, a, b) {
        (Some(m), Some(l), None, None, None) => {
            let t = trunc_or(default_trunc(l))?;
            let m = GermMatrix2::parse(&m, t).map_err(usage)?;
            let nf = normal_form(&LocalHiggsData::new(m, l).map_err(usage)?).map_err(usage)?;
            let text = format!("D = {} Lambda = {}\ngauge {}\nnormal form {}\n", nf.d, nf.lambda, nf.gauge, nf.conjugated);
            let mut json = to_json(&nf);
            json["formulas"] = json!(["normal form z^D [[0,1],[z^(2L-2D) u,0]]"]);
            Ok(Output { json, text, dot: None, code: 0 })
        }
        (None, None, Some(d), Some(a), Some(b)) => {
            let t = trunc_or(3 * d + 4)?;
            let ga = Germ::parse(&a, t).map_err(usage)?;
            let gb = Germ::parse(&b, t).map_err(usage)?;
            let m = hecke_higgs(d, &ga, &gb).map_err(usage)?;
            let div = vanishing_divisor(&m).ok();
            let tw = eigen_twist_orders(&m, d).ok();
            let json = json!({
                "d": d,
                "matrix": m,
                "vanishing_divisor": div,
                "twist_orders": tw,
                "formulas": ["[[(a/b) z^d, b^2 - a^2], [z^(2d)/b^2, -(a/b) z^d]]"],
            });
            let mut text = format!("Hecke Higgs field {m}\n");
            if let Some(v) = div {
                writeln!(text, "vanishing divisor {v}").unwrap();
            }
            if let Some(t) = tw {
                writeln!(text, "eigenline twists plus {} minus {}", t.plus, t.minus).unwrap();
            }
            Ok(Output { json, text, dot: None, code: 0 })
        }
        _ => Err(usage("give either --matrix with --lambda, or --d with --a and --b")),
    }
}

fn run_realpoints(genus: u32, zeros: Vec<u32>) -> Result<Output, String> {
    let p = profile(genus, zeros, true)?;
    let total = total_real_points(&p).map_err(usage)?;
    let strata = enumerate_strata(&p);
    let mut rows = Vec::new();
    let mut text = String::new();
    for s in &strata {
        let c = count_real_points(&p, &s.divisor).map_err(usage)?;
        writeln!(text, "D = {:?}: {c}", s.divisor.coeffs).unwrap();
        rows.push(json!({"D": s.divisor, "real_points": c.to_string()}));
    }
    writeln!(text, "total {total}").unwrap();
    let mut warnings = Vec::new();
    let odd = odd_profile_total(&p).map(|x| x.to_string());
    let dbl = double_zero_total(&p).map(|x| x.to_string());
    let single = single_even_zero_forms(&p);
    if let Some(f) = &single {
        if !f.agree {
            warnings.push(format!(
                "single even zero: stratum sum {} differs from the printed closed form {}",
                f.derived, f.printed
            ));
        }
    }
    for w in &warnings {
        writeln!(text, "warning: {w}").unwrap();
    }
    let json = json!({
        "profile": p,
        "strata": rows,
        "total": total.to_string(),
        "odd_profile_closed_form": odd,
        "double_zero_closed_form": dbl,
        "single_even_zero_forms": single,
        "formulas": ["real_points(D) = 2^(2g - 2 + n - n0)", "odd profiles: 2^(2g-2) prod(m_i + 1)"],
        "warnings": warnings,
    });
    Ok(Output { json, text, dot: None, code: 0 })
}

fn run_oracle(suite: &str, seed: u64, cases: usize) -> Result<Output, String> {
    let rep = run_suite(suite, seed, cases).map_err(usage)?;
    let mut text = format!(
        "suite {} seed {}: {}/{} passed\n",
        rep.suite, rep.seed, rep.passed, rep.cases
    );
    for f in &rep.failures {
        writeln!(text, "FAIL case {}: {}", f.case, f.detail).unwrap();
    }
    for n in &rep.notes {
        writeln!(text, "note: {n}").unwrap();
    }
    let code = if rep.ok() { 0 } else { 1 };
    Ok(Output { json: to_json(&rep), text, dot: None, code })
}

fn run(cli: Cli) -> Result<(Output, bool), String> {
    let mut want_dot = cli.format == Format::Dot;
    let out = match cli.cmd {
        Cmd::Strata { genus, zeros, dot, assume_no_global_sqrt } => {
            want_dot |= dot;
            run_strata(genus, zeros, assume_no_global_sqrt)?
        }
        Cmd::Canon { d, a, b, even } => run_canon(d, &a, &b, even)?,
        Cmd::HeckAtlas { d } => run_atlas(d)?,
        Cmd::Higgs { matrix, lambda, d, a, b } => run_higgs(matrix, lambda, d, a, b)?,
        Cmd::Realpoints { genus, zeros } => run_realpoints(genus, zeros)?,
        Cmd::Oracle { suite, seed, cases } => run_oracle(&suite, seed, cases)?,
    };
    if want_dot && out.dot.is_none() {
        return Err(usage("DOT output is only available for strata"));
    }
    Ok((out, want_dot))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    match run(cli) {
        Ok((out, dot)) => {
            let body = if dot {
                out.dot.unwrap()
            } else if format == Format::Text {
                out.text
            } else {
                serde_json::to_string_pretty(&out.json).expect("json") + "\n"
            };
            // a closed pipe downstream is not an error of ours
            let _ = std::io::stdout().lock().write_all(body.as_bytes());
            ExitCode::from(out.code)
        }
        Err(msg) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
    }
}
