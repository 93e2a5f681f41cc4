use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use num_bigint::BigInt;
use serde_json::{json, Value};

use quadcert::arith::primes::FactorBudget;
use quadcert::certify::{
    build_certificate, certify_field, decide_represent, totally_positive_up_to, verify_with, BuildOptions, Built,
    Certificate, QuadraticForm, Representation, Soundness, Verdict, VerifyOptions,
};
use quadcert::contfrac::expand_sqrt;
use quadcert::friesen::{construct_sequence, growth_condition, k_progression, parity_condition, search_k, SymSequence};
use quadcert::smallnorm::{classify, enumerate_small_norm, power_trace, ConvergentIndex, NormBound, Ring};
use quadcert::{QuadElem, SquarefreeMode};

use crate::{Cli, Command};

fn mode_str(m: SquarefreeMode) -> String {
    match m {
        SquarefreeMode::Exact => "exact".into(),
        SquarefreeMode::Probable(b) => format!("probable:{b}"),
    }
}

fn budget(cli: &Cli) -> FactorBudget {
    FactorBudget { rho_steps: cli.factor_steps }
}

/// Text and JSON renderings of one command's result.
struct Output {
    text: String,
    result: Value,
    params: Value,
    code: u8,
}

pub fn run(cli: &Cli) -> Result<u8> {
    let (name, out) = match &cli.command {
        Command::Cf { d, terms } => ("cf", cf(d, *terms)?),
        Command::FriesenCheck { seq } => ("friesen-check", friesen_check(seq)?),
        Command::FriesenSearch { seq, k, squarefree, max_candidates } => {
            ("friesen-search", friesen_search(cli, seq, k, *squarefree, *max_candidates)?)
        }
        Command::Construct { m, base } => ("construct", construct(*m, *base)?),
        Command::Certify { .. } => ("certify", certify(cli)?),
        Command::Verify { file } => ("verify", verify(cli, file)?),
        Command::Smallnorm { d, bound, y_max } => ("smallnorm", smallnorm(d, bound, *y_max)?),
        Command::PowerTrace { d, i, m } => ("power-trace", trace(d, *i, *m)?),
        Command::Represent { d, form, target } => ("represent", represent(cli, d, form, target)?),
        Command::TpList { d, trace } => ("tp-list", tp_list(d, *trace)?),
    };
    if cli.json {
        let doc = json!({
            "config": {
                "command": name,
                "params": out.params,
                "threads": rayon::current_num_threads(),
                "factor_steps": cli.factor_steps,
                "enum_budget": cli.enum_budget,
            },
            "result": out.result,
        });
        emit(&(serde_json::to_string_pretty(&doc)? + "\n"))?;
    } else {
        emit(&out.text)?;
    }
    Ok(out.code)
}

/// Writes to stdout; a closed pipe ends output quietly.
fn emit(s: &str) -> Result<()> {
    use std::io::Write;
    match std::io::stdout().lock().write_all(s.as_bytes()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn cf(d: &BigInt, terms: Option<usize>) -> Result<Output> {
    let e = expand_sqrt(d)?;
    let n = terms.unwrap_or(e.s());
    let mut text = format!("{e}\ns = {}, r = {}\n", e.s(), e.r());
    writeln!(text, "{:>4}  {:>24}  {:>24}  {:>12}  {:>8}  {:>8}", "i", "p_i", "q_i", "N(alpha_i)", "fraction", "norm")?;
    let mut rows = Vec::new();
    let mut all_pass = true;
    for c in e.convergents(n) {
        let fb = e.fraction_bounds_at(&c);
        let nb = e.norm_bounds_at(&c);
        let frac_ok = fb.lower_holds && fb.upper_holds;
        let norm_ok = nb.lower_holds && nb.upper_holds;
        all_pass &= frac_ok && norm_ok;
        let verdict = |ok: bool| if ok { "pass" } else { "FAIL" };
        writeln!(
            text,
            "{:>4}  {:>24}  {:>24}  {:>12}  {:>8}  {:>8}",
            c.i,
            c.p,
            c.q,
            nb.norm,
            verdict(frac_ok),
            verdict(norm_ok)
        )?;
        rows.push(json!({ "convergent": c, "fraction_bounds": fb, "norm_bounds": nb }));
    }
    writeln!(text, "bounds: {}", if all_pass { "all pass" } else { "violations found" })?;
    Ok(Output {
        text,
        result: json!({
            "D": d.to_string(),
            "k": e.k().to_string(),
            "period": e.period().iter().map(|u| u.to_string()).collect::<Vec<_>>(),
            "s": e.s(),
            "r": e.r(),
            "convergents": rows,
            "all_pass": all_pass,
        }),
        params: json!({ "D": d.to_string(), "terms": n }),
        code: 0,
    })
}

fn friesen_check(seq: &str) -> Result<Output> {
    let s = SymSequence::parse(seq)?;
    let parity = parity_condition(&s)?;
    let growth = growth_condition(&s);
    let prog = k_progression(&s);
    let mut text = format!("sequence {s}: s = {}, r = {}\n", s.s(), s.r());
    writeln!(text, "parity: condition {}", if parity { "holds" } else { "fails" })?;
    match &prog {
        Some((k0, step)) => writeln!(text, "D is integral exactly for k ≡ {k0} (mod {step})")?,
        None => writeln!(text, "no k makes D integral")?,
    }
    writeln!(text, "growth u_1 ≥ 2, u_(i+1) ≥ u_i^3: {}", if growth { "yes" } else { "no" })?;
    Ok(Output {
        text,
        result: json!({
            "sequence": s.to_string(),
            "s": s.s(),
            "r": s.r(),
            "parity_condition": parity,
            "growth_condition": growth,
            "k_progression": prog.map(|(a, b)| json!({ "k0": a.to_string(), "step": b.to_string() })),
        }),
        params: json!({ "seq": seq }),
        code: 0,
    })
}

fn friesen_search(
    cli: &Cli,
    seq: &str,
    k: &(BigInt, BigInt),
    mode: SquarefreeMode,
    max_candidates: u64,
) -> Result<Output> {
    let s = SymSequence::parse(seq)?;
    let hits = search_k(&s, &k.0, &k.1, mode, budget(cli), max_candidates)?;
    let mut text = format!("sequence {s}, k in {}..{}: {} hit(s)\n", k.0, k.1, hits.len());
    for h in &hits {
        let sf = h.squarefree.as_ref().map_or("undetermined".to_string(), |st| st.to_string());
        writeln!(text, "k = {}  D = {}  {sf}", h.k, h.d)?;
    }
    Ok(Output {
        text,
        result: json!({ "hits": hits }),
        params: json!({
            "seq": seq,
            "k": [k.0.to_string(), k.1.to_string()],
            "squarefree": mode_str(mode),
            "max_candidates": max_candidates,
        }),
        code: 0,
    })
}

fn construct(m: usize, base: quadcert::friesen::Base) -> Result<Output> {
    let c = construct_sequence(m, base)?;
    let prog = k_progression(&c.seq);
    let mut text = format!("sequence {}\n", c.seq);
    writeln!(text, "s = {}, r = {}, central scale {}, parity condition holds", c.seq.s(), c.seq.r(), c.central_scale)?;
    if let Some((k0, step)) = &prog {
        writeln!(text, "D is integral exactly for k ≡ {k0} (mod {step})")?;
    }
    Ok(Output {
        text,
        result: json!({
            "sequence": c.seq.values().iter().map(|u| u.to_string()).collect::<Vec<_>>(),
            "s": c.seq.s(),
            "r": c.seq.r(),
            "central_scale": c.central_scale,
            "parity_condition": c.parity,
            "k_progression": prog.map(|(a, b)| json!({ "k0": a.to_string(), "step": b.to_string() })),
        }),
        params: json!({ "M": m, "base": base }),
        code: 0,
    })
}

fn certify(cli: &Cli) -> Result<Output> {
    let Command::Certify { m, base, squarefree, k_start, max_k, field, indices, output } = &cli.command else {
        unreachable!()
    };
    let mut opts = BuildOptions::new(*m);
    opts.base = *base;
    if let Some(mode) = squarefree {
        opts.mode = *mode;
    }
    opts.factor_budget = budget(cli);
    opts.k_start = k_start.clone();
    opts.max_k_candidates = *max_k;
    opts.enum_budget = cli.enum_budget;
    let built: Built = match field {
        Some(d) => certify_field(d, *m, indices.as_deref(), opts.mode, opts.factor_budget, opts.enum_budget)?,
        None => {
            if indices.is_some() {
                bail!("--indices needs an explicit field (-D)");
            }
            build_certificate(&opts)?
        }
    };
    let cert = &built.certificate;
    if let Some(path) = output {
        std::fs::write(path, cert.to_json() + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    let mut text = format!("D = {}\nk = {}\nsquarefree: {:?}\n", cert.d, cert.k, cert.squarefree.verdict);
    for w in &cert.witnesses {
        writeln!(text, "witness alpha_{} = {}+{}*sqrt(D)", w.i, w.p, w.q)?;
    }
    for p in &cert.pairs {
        writeln!(text, "pair ({}, {}): {} candidates, {} violators", p.i, p.j, p.candidates, p.violators.len())?;
        for v in &p.violators {
            writeln!(text, "  violator {v}")?;
        }
    }
    writeln!(text, "{}", cert.conclusion.statement)?;
    let code = if cert.conclusion.soundness == Soundness::Refuted { 1 } else { 0 };
    Ok(Output {
        text,
        result: serde_json::to_value(cert)?,
        params: json!({
            "M": m,
            "base": base,
            "squarefree": mode_str(opts.mode),
            "k_start": k_start.to_string(),
            "max_k": max_k,
            "D": field.as_ref().map(|d| d.to_string()),
            "indices": indices,
            "output": output.as_ref().map(|p| p.display().to_string()),
        }),
        code,
    })
}

fn verify(cli: &Cli, file: &std::path::Path) -> Result<Output> {
    let raw = std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let cert = Certificate::from_json(&raw).context("malformed certificate")?;
    let opts = VerifyOptions { factor_budget: budget(cli), ..VerifyOptions::default() };
    let verdict = verify_with(&cert, &opts);
    let (status, reason, code) = match &verdict {
        Verdict::Accepted { soundness } => ("accepted", serde_json::to_value(soundness)?, 0),
        Verdict::Rejected(r) => ("rejected", json!(r), 1),
    };
    Ok(Output {
        text: format!("{verdict}\n"),
        result: json!({ "verdict": status, "detail": reason }),
        params: json!({ "file": file.display().to_string() }),
        code,
    })
}

fn smallnorm(d: &BigInt, bound: &str, y_max: u64) -> Result<Output> {
    let (nb, ring) = match bound {
        "half" => (NormBound::HalfRoot, Ring::Zsqrt),
        "eighth" => (NormBound::EighthRoot, Ring::Integers),
        _ => bail!("unknown bound {bound:?}; expected half or eighth"),
    };
    let e = expand_sqrt(d)?;
    let index = ConvergentIndex::new(&e, &BigInt::from(y_max));
    let mut elements = enumerate_small_norm(d, &nb, y_max, ring);
    for el in &mut elements {
        el.classified_as = classify(el, &index);
    }
    let unmatched = elements.iter().filter(|e| e.classified_as.is_none()).count();
    let mut text = format!("|N(mu)| < {}, 1 ≤ y ≤ {y_max}: {} element(s)\n", nb.describe(d), elements.len());
    for el in &elements {
        let m = match &el.classified_as {
            Some(m) => format!("{} * alpha_{}{}", m.n, m.i, if m.conjugate { "'" } else { "" }),
            None => "unmatched".into(),
        };
        writeln!(text, "{}  N = {}  {m}", el.mu(d), el.norm)?;
    }
    writeln!(text, "unmatched: {unmatched}")?;
    Ok(Output {
        text,
        result: json!({ "D": d.to_string(), "bound": nb.describe(d), "ring": ring, "elements": elements, "unmatched": unmatched }),
        params: json!({ "D": d.to_string(), "bound": bound, "y_max": y_max }),
        code: 0,
    })
}

fn trace(d: &BigInt, i: usize, m: u32) -> Result<Output> {
    let e = expand_sqrt(d)?;
    let t = power_trace(&e, i, m);
    let mut text = format!("alpha_{i}^{m} = {}\nN = {}\n", t.power, t.norm);
    writeln!(text, "primitive: {}, |N| < sqrt(D)/2: {}, > 1: {}", t.primitive, t.norm_ok, t.greater_than_one)?;
    match t.located_index {
        Some(j) => {
            writeln!(text, "located: alpha_{j}, u_(j+1) = {}", t.u_next.as_ref().unwrap())?;
            if let Some(x) = t.exponent {
                writeln!(text, "log u_(j+1) / log D = {x:.6}")?;
            }
        }
        None => writeln!(text, "not a convergent element")?,
    }
    Ok(Output {
        text,
        result: serde_json::to_value(&t)?,
        params: json!({ "D": d.to_string(), "i": i, "m": m }),
        code: 0,
    })
}

fn represent(cli: &Cli, d: &BigInt, form: &str, target: &str) -> Result<Output> {
    let f = QuadraticForm::parse(form, d)?;
    let t = QuadElem::parse_in(target, d)?;
    let (r, log) = decide_represent(&f, &t, cli.enum_budget)?;
    let mut text = format!("Q = {f}\ntarget {t}\n");
    for (i, (b, (lo, hi))) in log.coordinate_bounds.iter().zip(&log.coordinate_bounds_approx).enumerate() {
        writeln!(text, "x{}^2 ⪯ {b}  (≈ {lo:.6}, {hi:.6})", i + 1)?;
    }
    let result = match &r {
        Representation::Found(v) => {
            let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            writeln!(text, "found ({})", parts.join(", "))?;
            json!({ "decision": "found", "vector": parts, "search": log })
        }
        Representation::Impossible => {
            writeln!(text, "impossible ({} nodes searched)", log.nodes)?;
            json!({ "decision": "impossible", "search": log })
        }
    };
    Ok(Output {
        text,
        result,
        params: json!({ "D": d.to_string(), "form": form, "target": target }),
        code: 0,
    })
}

fn tp_list(d: &BigInt, trace: u64) -> Result<Output> {
    expand_sqrt(d)?;
    let xs = totally_positive_up_to(d, trace);
    let mut text = String::new();
    for x in &xs {
        writeln!(text, "{x}  trace {}  norm {}", x.trace(), x.norm())?;
    }
    Ok(Output {
        text,
        result: json!({ "elements": xs.iter().map(|x| x.to_string()).collect::<Vec<_>>() }),
        params: json!({ "D": d.to_string(), "trace": trace }),
        code: 0,
    })
}
