//! Subcommands. Output goes to the given writers; the return value is the
//! exit code: 0 success, 1 a failed check, 2 a usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::cats::HatObj;
use crate::contraction::{d_chain, dprime_chain, finite_certificate};
use crate::diagrams::{raw_tower, standard_signature};
use crate::finite_model::{battery_envs, equiv_check, eval_telescope, horn_oracle, pair_oracle, parse_fixture, ModelEnv};
use crate::horn::{check_s_chain, horn_poset, s_chain, HornSpec, Subset};
use crate::rewrite::{builtin_chain, check_chain, check_chain_in_models, EquivChain, BUILTINS};
use crate::typeexpr::{telescope_lines, Format};

use super::cert::{parse_certificate, write_certificate, CertificateFile};
use super::emit::{emit_statement, tower_telescope, EmitRequest};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Fmt {
    Agda,
    Coq,
    Latex,
    Unicode,
}

impl From<Fmt> for Format {
    fn from(f: Fmt) -> Format {
        match f {
            Fmt::Agda => Format::Agda,
            Fmt::Coq => Format::Coq,
            Fmt::Latex => Format::Latex,
            Fmt::Unicode => Format::Unicode,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Check {
    Horn,
    Pair,
    TowerStab,
}

#[derive(Debug, Parser)]
#[command(name = "truncup", version, about = "Coherence towers, horn chains, pairings and contraction certificates")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Print A →ᴷ B as a telescope.
    Tower {
        #[arg(long, allow_negative_numbers = true)]
        n: i32,
        /// Readable form, available for K ≤ 2.
        #[arg(long)]
        nice: bool,
        #[arg(long, value_enum, default_value = "unicode")]
        format: Fmt,
    },
    /// Print the α sequence and subset chain for a horn.
    Horn {
        /// Vertices, comma separated.
        #[arg(long)]
        s: String,
        #[arg(long)]
        k: usize,
    },
    /// Print the even pairing chain, or the odd one with --prime.
    Pairings {
        #[arg(long)]
        bound: usize,
        #[arg(long)]
        prime: bool,
    },
    /// Replay a certificate file or a builtin chain.
    Verify {
        #[arg(long, conflicts_with = "builtin", required_unless_present = "builtin")]
        chain: Option<PathBuf>,
        #[arg(long)]
        builtin: Option<String>,
        /// Also check every step against the model battery.
        #[arg(long)]
        models: bool,
    },
    /// Write the finite certificate for level K.
    Certify {
        #[arg(long, allow_negative_numbers = true)]
        n: i32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a model oracle over every environment of a fixture file.
    Oracle {
        #[arg(long, value_enum)]
        check: Check,
        #[arg(long)]
        env: PathBuf,
    },
    /// Emit the statement for level K.
    Emit {
        #[arg(long, allow_negative_numbers = true)]
        n: i32,
        #[arg(long, value_enum, default_value = "unicode")]
        format: Fmt,
        /// Append the certificate as comments.
        #[arg(long)]
        certificate: bool,
        #[arg(long)]
        nice: bool,
    },
}

const OK: i32 = 0;
const FAILED: i32 = 1;
const USAGE: i32 = 2;

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn say(&mut self, s: impl AsRef<str>) {
        let _ = writeln!(self.out, "{}", s.as_ref());
    }

    fn fail(&mut self, code: i32, s: impl AsRef<str>) -> i32 {
        let _ = writeln!(self.err, "error: {}", s.as_ref());
        code
    }
}

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { OK };
            let text = e.render().to_string();
            let _ = if code == OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let mut io = Io { out, err };
    match cli.cmd {
        Cmd::Tower { n, nice, format } => tower(&mut io, n, nice, format.into()),
        Cmd::Horn { s, k } => horn(&mut io, &s, k),
        Cmd::Pairings { bound, prime } => pairings(&mut io, bound, prime),
        Cmd::Verify { chain, builtin, models } => verify(&mut io, chain, builtin, models),
        Cmd::Certify { n, out } => certify(&mut io, n, out),
        Cmd::Oracle { check, env } => oracle(&mut io, check, env),
        Cmd::Emit { n, format, certificate, nice } => {
            if n < -1 {
                return io.fail(USAGE, "level must be at least -1");
            }
            let text = emit_statement(&EmitRequest { n, format: format.into(), certificate, nice });
            let _ = write!(io.out, "{text}");
            OK
        }
    }
}

fn tower(io: &mut Io, n: i32, nice: bool, fmt: Format) -> i32 {
    if n < -1 {
        return io.fail(USAGE, "level must be at least -1");
    }
    if nice && n > 2 {
        return io.fail(USAGE, format!("no readable form for level {n}"));
    }
    let t = tower_telescope(n, nice);
    let sig = standard_signature(n.max(0) as usize);
    for l in telescope_lines(&t, fmt, &sig) {
        io.say(l);
    }
    OK
}

fn show(s: &Subset) -> String {
    let xs: Vec<String> = s.iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", xs.join(","))
}

fn horn(io: &mut Io, s: &str, k: usize) -> i32 {
    let verts: Result<Vec<usize>, _> = s.split(',').map(|x| x.trim().parse::<usize>()).collect();
    let Ok(verts) = verts else {
        return io.fail(USAGE, format!("bad vertex list `{s}`"));
    };
    let spec = match HornSpec::new(&verts, k) {
        Ok(h) => h,
        Err(e) => return io.fail(USAGE, e.to_string()),
    };
    let c = s_chain(&spec);
    let start: Vec<String> = c.start.iter().map(show).collect();
    io.say(format!("S0 = {}", start.join(" ")));
    for (i, (a, b)) in c.steps.iter().enumerate() {
        io.say(format!("α{} = {}  S{} = S{} + {} + {}", i + 1, show(a), i + 1, i, show(a), show(b)));
    }
    let hp: Vec<String> = horn_poset(&spec).iter().map(show).collect();
    io.say(format!("horn = {}", hp.join(" ")));
    match check_s_chain(&spec, &c) {
        Ok(()) => {
            io.say("chain ok");
            OK
        }
        Err(d) => io.fail(FAILED, format!("chain defect: {d:?}")),
    }
}

fn pairings(io: &mut Io, bound: usize, prime: bool) -> i32 {
    if bound == 0 {
        return io.fail(USAGE, "bound must be at least 1");
    }
    let c = if prime { dprime_chain(bound) } else { d_chain(bound) };
    io.say(format!("start {}", c.start.to_tokens()));
    for (i, (lo, up)) in c.steps.iter().enumerate() {
        io.say(format!("{} {lo} {up}", i + 1));
    }
    match c.stages() {
        Ok(st) => {
            io.say(format!("end {}", st.last().expect("nonempty").to_tokens()));
            OK
        }
        Err(e) => io.fail(FAILED, e.to_string()),
    }
}

fn read(io: &mut Io, path: &PathBuf) -> Result<String, i32> {
    std::fs::read_to_string(path).map_err(|e| io.fail(USAGE, format!("cannot read {}: {e}", path.display())))
}

fn verify(io: &mut Io, chain: Option<PathBuf>, builtin: Option<String>, models: bool) -> i32 {
    let c: EquivChain = match (chain, builtin) {
        (Some(path), _) => {
            let text = match read(io, &path) {
                Ok(t) => t,
                Err(code) => return code,
            };
            match parse_certificate(&text) {
                Ok(f) => f.chain,
                Err(e) => return io.fail(FAILED, format!("{}: {e}", path.display())),
            }
        }
        (None, Some(name)) => match builtin_chain(&name) {
            Some(c) => c,
            None => return io.fail(USAGE, format!("unknown builtin `{name}`; known: {}", BUILTINS.join(", "))),
        },
        (None, None) => return io.fail(USAGE, "give --chain or --builtin"),
    };
    match check_chain(&c) {
        Ok(stages) => io.say(format!("replayed {} steps; end telescope matches", stages.len() - 1)),
        Err(e) => return io.fail(FAILED, e.to_string()),
    }
    if models {
        match check_chain_in_models(&c, &battery_envs()) {
            Ok(k) => io.say(format!("every step holds in {k} battery environments")),
            Err(e) => return io.fail(FAILED, e.to_string()),
        }
    }
    OK
}

fn certify(io: &mut Io, n: i32, out: Option<PathBuf>) -> i32 {
    if n < -1 {
        return io.fail(USAGE, "level must be at least -1");
    }
    let cert = match finite_certificate(n) {
        Ok(c) => c,
        Err(e) => return io.fail(FAILED, e.to_string()),
    };
    if let Err(e) = check_chain(&cert.chain) {
        return io.fail(FAILED, e.to_string());
    }
    let text = write_certificate(&CertificateFile { n: Some(n), chain: cert.chain.clone() });
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, text) {
                return io.fail(USAGE, format!("cannot write {}: {e}", path.display()));
            }
            io.say(format!("wrote {} ({} steps)", path.display(), cert.chain.steps.len()));
        }
        None => {
            let _ = write!(io.out, "{text}");
        }
    }
    OK
}

fn oracle(io: &mut Io, check: Check, path: PathBuf) -> i32 {
    let text = match read(io, &path) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let fixture = match parse_fixture(&text) {
        Ok(f) => f,
        Err(e) => return io.fail(USAGE, format!("{}: {e}", path.display())),
    };
    let mut failures = 0;
    for env in &fixture.envs {
        for (what, verdict) in run_check(check, env) {
            let line = match &verdict {
                Ok(true) => format!("{} {what}: true", env.name),
                Ok(false) => format!("{} {what}: false", env.name),
                Err(e) => format!("{} {what}: error: {e}", env.name),
            };
            if verdict != Ok(true) {
                failures += 1;
            }
            io.say(line);
        }
    }
    if failures == 0 {
        OK
    } else {
        io.fail(FAILED, format!("{failures} check(s) failed"))
    }
}

type Verdict = Result<bool, String>;

fn run_check(check: Check, env: &ModelEnv) -> Vec<(String, Verdict)> {
    let mut out = Vec::new();
    match check {
        Check::Horn => {
            for n in 1..=2 {
                for k in 0..=n {
                    out.push((format!("horn n={n} k={k}"), horn_oracle(n, k, env).map_err(|e| e.to_string())));
                }
            }
        }
        Check::Pair => {
            if !env.has_basepoint() {
                out.push(("pairs".into(), Err("no basepoint a0".into())));
                return out;
            }
            for (name, chain) in [("d", d_chain(3)), ("d'", dprime_chain(3))] {
                let Ok(stages) = chain.stages() else {
                    out.push((format!("{name} chain"), Err("chain does not replay".into())));
                    continue;
                };
                for (i, &(lo, up)) in chain.steps.iter().enumerate() {
                    out.push((pair_label(name, lo, up), pair_oracle(lo, up, &stages[i], env).map_err(|e| e.to_string())));
                }
            }
        }
        Check::TowerStab => {
            let Some(&n) = env.levels.get("B") else {
                out.push(("tower".into(), Err("no declared level for B".into())));
                return out;
            };
            for k in (n + 1).max(0)..=2 {
                let v = eval_telescope(&raw_tower(k), env)
                    .and_then(|lo| eval_telescope(&raw_tower(k + 1), env).and_then(|hi| equiv_check(&lo, &hi)))
                    .map_err(|e| e.to_string());
                out.push((format!("tower k={k}"), v));
            }
        }
    }
    out
}

fn pair_label(chain: &str, lo: HatObj, up: HatObj) -> String {
    format!("{chain} pair {lo} {up}")
}
