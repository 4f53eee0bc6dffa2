use std::collections::BTreeSet;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use squidgets::geometry::Point2;
use squidgets::matching::{distance_cutoff, rank_candidates, SelectOptions};
use squidgets::persistence::{load_document, save_document, EventLog};
use squidgets::protocol::Engine;
use squidgets::scene::AttributePath;
use squidgets::session::{replay, Effect, EventKind, Session, SessionEvent};
use squidgets::solver::solve_scalar;
use squidgets::{demos, Document};

#[derive(Parser)]
#[command(name = "squidgets", version, about = "Headless driver for stroke-driven scene manipulation")]
struct Cli {
    /// Config override as key=value (lambda, threshold, hold-ms, resample-n, ...).
    #[arg(long = "config", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replays an event log and writes the final document.
    Replay {
        scene: PathBuf,
        log: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Skip the header hash check.
        #[arg(long)]
        no_verify: bool,
    },
    /// Prints every candidate for a stroke, best first.
    Match { scene: PathBuf, stroke: PathBuf },
    /// Solves one shape parameter of the object a stroke retraces.
    Solve {
        scene: PathBuf,
        stroke: PathBuf,
        #[arg(long)]
        attr: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Checks document invariants; with --probes, also replays random
    /// strokes and checks that undo restores the document.
    Validate {
        scene: PathBuf,
        #[arg(long, default_value_t = 0)]
        probes: usize,
    },
    /// Regenerates the bundled demo files.
    Demos {
        #[arg(short, long, default_value = "demos")]
        out: PathBuf,
    },
    /// Serves the message protocol over stdin/stdout, one JSON object per line.
    Serve { scene: PathBuf },
}

/// Failure in the domain, as opposed to a malformed invocation.
struct Domain(anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for Domain {
    fn from(e: E) -> Self {
        Domain(e.into())
    }
}

fn read(path: &Path) -> Result<String, Domain> {
    fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Domain)
}

fn load(path: &Path, overrides: &[(String, String)]) -> Result<Document, Domain> {
    let mut doc = load_document(&read(path)?).with_context(|| path.display().to_string())?;
    for (k, v) in overrides {
        doc.config.set(k, v).map_err(|e| anyhow!(e))?;
    }
    Ok(doc)
}

fn stroke_of(path: &Path) -> Result<squidgets::geometry::Polyline, Domain> {
    let log = EventLog::parse(&read(path)?).with_context(|| path.display().to_string())?;
    Ok(log.stroke()?)
}

fn write_out(path: &Path, text: &str) -> Result<(), Domain> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn cmd_replay(
    scene: &Path,
    log: &Path,
    output: &Path,
    verify: bool,
    overrides: &[(String, String)],
) -> Result<(), Domain> {
    let doc = load(scene, &[])?;
    let log = EventLog::parse(&read(log)?)?;
    if verify {
        log.header.verify(&doc)?;
    }
    let mut doc = doc;
    for (k, v) in overrides {
        doc.config.set(k, v).map_err(|e| anyhow!(e))?;
    }
    let (session, effects) = replay(doc, &log.events)?;
    write_out(output, &save_document(&session.doc))?;
    let mut selections = 0;
    let mut attrs = BTreeSet::new();
    let (mut created, mut deleted, mut errors) = (0, 0, 0);
    for e in &effects {
        match e {
            Effect::SelectionHighlight { .. } => selections += 1,
            Effect::AttributeChanged { path, .. } => {
                attrs.insert(path.to_string());
            }
            Effect::SquidgetCreated { .. } => created += 1,
            Effect::SquidgetDeleted { .. } => deleted += 1,
            Effect::Error { .. } => errors += 1,
            _ => {}
        }
    }
    println!("events: {}", log.events.len());
    println!("selections: {selections}");
    println!("attributes changed: {}", attrs.len());
    for a in &attrs {
        println!("  {a}");
    }
    println!("squidgets created: {created}");
    println!("squidgets deleted: {deleted}");
    println!("errors: {errors}");
    Ok(())
}

fn cmd_match(scene: &Path, stroke: &Path, overrides: &[(String, String)]) -> Result<(), Domain> {
    let doc = load(scene, overrides)?;
    let raw = stroke_of(stroke)?;
    let cutoff = distance_cutoff(&doc.config, &raw.resample(doc.config.resample_n)?);
    let ranked = rank_candidates(&doc, &raw, SelectOptions::default())?;
    println!(
        "{:<4} {:<28} {:<10} {:>14} {:>14} {:>14}",
        "rank", "id", "kind", "distance", "dev", "score"
    );
    let selected = ranked.iter().position(|m| m.distance <= cutoff);
    for (i, m) in ranked.iter().enumerate() {
        let mark = if Some(i) == selected { " *" } else { "" };
        println!(
            "{:<4} {:<28} {:<10} {:>14.6e} {:>14.6e} {:>14.6e}{mark}",
            i + 1,
            m.squidget,
            m.kind.name(),
            m.distance,
            m.dev,
            m.score
        );
    }
    match selected {
        Some(i) => println!("selected: {}", ranked[i].squidget),
        None => println!("selected: none (cut-off {cutoff:.6e})"),
    }
    Ok(())
}

fn cmd_solve(
    scene: &Path,
    stroke: &Path,
    attr: &str,
    output: Option<&Path>,
    overrides: &[(String, String)],
) -> Result<(), Domain> {
    let mut doc = load(scene, overrides)?;
    let path = AttributePath::parse(attr)?;
    let raw = stroke_of(stroke)?;
    let ranked = rank_candidates(&doc, &raw, SelectOptions::default())?;
    let fit = ranked
        .iter()
        .filter_map(|m| m.implicit())
        .find(|f| f.squidget.object == path.root())
        .ok_or_else(|| anyhow!("stroke does not fit any contour of {}", path.root()))?
        .clone();
    let sol = solve_scalar(&mut doc, &fit.stroke, &fit.squidget, &path)?;
    println!("segment: {}", fit.squidget.id);
    println!("{path}: {} -> {}", sol.update.changes[0].old, sol.value);
    println!("residual: {:.6e} (initial {:.6e})", sol.residual, sol.initial);
    if let Some(out) = output {
        write_out(out, &save_document(&doc))?;
    }
    Ok(())
}

fn random_stroke(rng: &mut ChaCha8Rng, doc: &Document) -> Vec<Point2> {
    let (mut lo, mut hi) = (Point2::new(-100.0, -100.0), Point2::new(100.0, 100.0));
    for o in &doc.scene.objects {
        let (x, y) = (o.transform.tx, o.transform.ty);
        lo = Point2::new(lo.x.min(x - 50.0), lo.y.min(y - 50.0));
        hi = Point2::new(hi.x.max(x + 50.0), hi.y.max(y + 50.0));
    }
    let world = Point2::new(rng.random_range(lo.x..hi.x), rng.random_range(lo.y..hi.y));
    let mut at = doc.to_screen(world);
    let n = rng.random_range(3..20);
    let mut pts = vec![at];
    for _ in 0..n {
        at += Point2::new(rng.random_range(-15.0..15.0), rng.random_range(-15.0..15.0));
        pts.push(at);
    }
    pts
}

fn cmd_validate(
    scene: &Path,
    probes: usize,
    seed: u64,
    overrides: &[(String, String)],
) -> Result<bool, Domain> {
    let doc = load(scene, overrides)?;
    let mut issues = doc.validate();
    if issues.is_empty() && probes > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let canonical = save_document(&doc);
        for k in 0..probes {
            let mut s = Session::new(doc.clone());
            let pts = random_stroke(&mut rng, &doc);
            let n = pts.len();
            for (i, &pos) in pts.iter().enumerate() {
                let kind = match i {
                    0 => EventKind::PointerDown { pos },
                    i if i + 1 == n => EventKind::PointerUp { pos },
                    _ => EventKind::PointerMove { pos },
                };
                s.handle_event(&SessionEvent::new(10 * i as u64, kind))?;
            }
            s.undo_all();
            if save_document(&s.doc) != canonical {
                issues.push(format!("probe {k}: undo did not restore the document"));
            }
        }
    }
    if issues.is_empty() {
        println!("ok");
        return Ok(true);
    }
    for i in &issues {
        println!("violation: {i}");
    }
    Ok(false)
}

fn cmd_demos(out: &Path) -> Result<(), Domain> {
    for d in demos::all() {
        d.write(out)?;
        println!("{}: {} events", d.name, d.log.events.len());
    }
    Ok(())
}

fn cmd_serve(scene: &Path, overrides: &[(String, String)]) -> Result<(), Domain> {
    let doc = load(scene, overrides)?;
    let mut engine = Engine::new(doc);
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for msg in engine.snapshot() {
        writeln!(out, "{}", serde_json::to_string(&msg)?)?;
    }
    out.flush()?;
    for line in io::stdin().lock().lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        for msg in engine.handle_line(&line) {
            writeln!(out, "{}", serde_json::to_string(&msg)?)?;
        }
        out.flush()?;
    }
    Ok(())
}

fn parse_overrides(raw: &[String]) -> anyhow::Result<Vec<(String, String)>> {
    raw.iter()
        .map(|s| match s.split_once('=') {
            Some((k, v)) => {
                // reject unknown keys and bad values before touching any file
                squidgets::Config::default()
                    .set(k, v)
                    .map_err(|e| anyhow!(e))?;
                Ok((k.to_string(), v.to_string()))
            }
            None => bail!("config override {s:?} is not key=value"),
        })
        .collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let overrides = match parse_overrides(&cli.overrides) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let result = match &cli.command {
        Command::Replay {
            scene,
            log,
            output,
            no_verify,
        } => cmd_replay(scene, log, output, !no_verify, &overrides).map(|_| true),
        Command::Match { scene, stroke } => cmd_match(scene, stroke, &overrides).map(|_| true),
        Command::Solve {
            scene,
            stroke,
            attr,
            output,
        } => cmd_solve(scene, stroke, attr, output.as_deref(), &overrides).map(|_| true),
        Command::Validate { scene, probes } => cmd_validate(scene, *probes, cli.seed, &overrides),
        Command::Demos { out } => cmd_demos(out).map(|_| true),
        Command::Serve { scene } => cmd_serve(scene, &overrides).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Domain(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
