use super::*;
use crate::rewrite::{builtin_chain, check_chain, BUILTINS};
use crate::typeexpr::Format;

// Binder names of non-dependent Σ and Π are not printed, so a parsed chain
// agrees with the original up to renaming; printing is the canonical form.
fn round_trip(file: &CertificateFile) -> CertificateFile {
    let text = write_certificate(file);
    let back = parse_certificate(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
    assert_eq!(back.n, file.n);
    assert_eq!(back.chain.levels, file.chain.levels);
    assert_eq!(back.chain.steps.len(), file.chain.steps.len());
    for (x, y) in back.chain.steps.iter().zip(&file.chain.steps) {
        assert_eq!(x.tag, y.tag);
        assert_eq!(x.step.kind(), y.step.kind());
    }
    assert_eq!(write_certificate(&back), text);
    back
}

#[test]
fn certificates_round_trip() {
    for n in -1..=2 {
        let file = emit_certificate(n).unwrap();
        assert_eq!(file.n, Some(n));
        let back = round_trip(&file);
        assert!(check_chain(&back.chain).is_ok(), "{n}");
    }
}

#[test]
fn builtin_chains_round_trip() {
    for name in BUILTINS {
        let chain = builtin_chain(name).unwrap();
        let file = CertificateFile { n: None, chain };
        let back = round_trip(&file);
        assert!(check_chain(&back.chain).is_ok(), "{name}");
    }
}

#[test]
fn comments_and_blank_lines_are_ignored() {
    let text = write_certificate(&emit_certificate(0).unwrap());
    let mut noisy = String::new();
    for l in text.lines() {
        noisy.push_str(l);
        noisy.push_str("\n\n# note\n");
    }
    assert_eq!(write_certificate(&parse_certificate(&noisy).unwrap()), text);
}

fn error_line(text: &str) -> usize {
    match parse_certificate(text) {
        Err(CertError::Syntax { line, .. }) => line,
        Ok(_) => panic!("accepted:\n{text}"),
    }
}

#[test]
fn parse_errors_name_the_line() {
    assert_eq!(error_line(""), 1);
    assert_eq!(error_line("certificate\n"), 1);
    let good = write_certificate(&emit_certificate(-1).unwrap());
    let lines: Vec<&str> = good.lines().collect();
    let step = lines.iter().position(|l| l.starts_with("step ")).unwrap();

    let mut bad = lines.clone();
    bad[step] = "step teleport";
    assert_eq!(error_line(&bad.join("\n")), step + 1);

    let mut bad = lines.clone();
    let lower = lines.iter().position(|l| l.starts_with("  lower")).unwrap();
    bad[lower] = "  lower 0;0";
    assert_eq!(error_line(&bad.join("\n")), lower + 1);

    let mut bad = lines.clone();
    bad.insert(1, "  stray");
    assert_eq!(error_line(&bad.join("\n")), 2);

    let bad: Vec<&str> = lines.iter().copied().filter(|l| !l.starts_with("end")).collect();
    assert!(parse_certificate(&bad.join("\n")).is_err());
}

#[test]
fn tampered_certificates_fail_replay() {
    let good = write_certificate(&emit_certificate(0).unwrap());
    for (from, to) in [("add true", "add false"), ("  at 5", "  at 4"), ("level B 0", "level B 1")] {
        let bad = good.replacen(from, to, 1);
        assert_ne!(bad, good, "{from}");
        let file = parse_certificate(&bad).unwrap();
        assert!(check_chain(&file.chain).is_err(), "{from}");
    }
}

#[test]
fn emission_is_deterministic_and_marked() {
    for n in -1..=2 {
        for (format, marker) in [
            (Format::Agda, "module TruncUp"),
            (Format::Coq, "Section"),
            (Format::Latex, "\\begin{align*}"),
            (Format::Unicode, ":≡"),
        ] {
            for certificate in [false, true] {
                let r = EmitRequest { n, format, certificate, nice: true };
                let a = emit_statement(&r);
                assert_eq!(a, emit_statement(&r));
                assert!(a.contains(marker), "{n} {format:?}\n{a}");
                assert_eq!(a.contains(CERT_HEADER), certificate, "{n} {format:?}");
            }
        }
    }
}

#[test]
fn emitted_certificates_parse_back() {
    let r = EmitRequest { n: 0, format: Format::Agda, certificate: true, nice: false };
    let text = emit_statement(&r);
    let body: String = text
        .lines()
        .skip_while(|l| !l.contains(CERT_HEADER))
        .map(|l| l.strip_prefix("-- ").or_else(|| l.strip_prefix("--")).unwrap_or(l))
        .collect::<Vec<_>>()
        .join("\n");
    let file = parse_certificate(&body).unwrap_or_else(|e| panic!("{e}\n{body}"));
    assert_eq!(write_certificate(&file), write_certificate(&emit_certificate(0).unwrap()));
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("truncup").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn cli_exit_codes() {
    assert_eq!(cli(&["--help"]).0, 0);
    assert_eq!(cli(&["--version"]).0, 0);
    assert_eq!(cli(&[]).0, 2);
    assert_eq!(cli(&["tower", "--n", "-1"]).0, 0);
    assert_eq!(cli(&["tower", "--n", "-2"]).0, 2);
    assert_eq!(cli(&["tower", "--n", "3", "--nice"]).0, 2);
    assert_eq!(cli(&["horn", "--s", "0,1,2", "--k", "1"]).0, 0);
    assert_eq!(cli(&["horn", "--s", "0,x", "--k", "0"]).0, 2);
    assert_eq!(cli(&["horn", "--s", "0,1", "--k", "5"]).0, 2);
    assert_eq!(cli(&["pairings", "--bound", "0"]).0, 2);
    assert_eq!(cli(&["verify", "--builtin", "prop22"]).0, 0);
    assert_eq!(cli(&["verify", "--builtin", "other"]).0, 2);
    assert_eq!(cli(&["verify", "--chain", "/nonexistent/cert"]).0, 2);
    assert_eq!(cli(&["emit", "--n", "0", "--format", "tex"]).0, 2);
}

#[test]
fn cli_tower_matches_the_nice_form() {
    let (code, out, _) = cli(&["tower", "--n", "2", "--nice"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 3);
    assert!(out.starts_with("f : A → B"));
}
