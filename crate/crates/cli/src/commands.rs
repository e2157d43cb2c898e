use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use qca_core::geometry::DEFAULT_GAP;
use qca_core::sweeps::{
    write_comparison_csv, write_kink_csv, write_polarizations_csv, write_snapshot,
    write_trace_csv, write_truth_csv, GAP_GRID, TEMPERATURE_GRID,
};
use qca_core::{
    builtin_layout, compare_to_reference, emit_csv, kink_matrix, parse_layout, serialize_layout,
    simulate_coherence, sweep_gap, sweep_temperature, truth_table_check, BuiltinLayout, Drives,
    Engine, Layout, LogicFunction, PhysicalConstants, ReferenceTable, SweepResult, TableId,
};

use crate::args::{Command, Common, EngineKind, Sci, SweepArgs};

type Snapshot = Vec<(String, String)>;

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Kink(common) => kink(&common),
        Command::Simulate { common, summary } => simulate(&common, summary),
        Command::Truth { common, function } => truth(&common, function.as_deref()),
        Command::SweepTemp { common, sweep } => sweep_temp(&common, &sweep),
        Command::SweepGap { common, sweep, cell } => sweep_displacement(&common, &sweep, cell.as_deref()),
        Command::Layouts { layout, gap } => layouts(layout.as_deref(), gap),
    }
}

struct Loaded {
    layout: Layout,
    builtin: Option<BuiltinLayout>,
    constants: PhysicalConstants,
    header: Snapshot,
}

fn load_layout(spec: &str, gap: Option<Sci>) -> Result<(Layout, Option<BuiltinLayout>)> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        let kind: BuiltinLayout = name.parse()?;
        let layout = builtin_layout(kind, gap.map_or(DEFAULT_GAP, |g| g.0))?;
        return Ok((layout, Some(kind)));
    }
    if gap.is_some() {
        bail!("--gap only applies to builtin: layouts");
    }
    let text = fs::read_to_string(spec).with_context(|| format!("cannot read layout `{spec}`"))?;
    let layout = parse_layout(&text).with_context(|| format!("layout `{spec}`"))?;
    let name = Path::new(spec)
        .file_stem()
        .map_or_else(|| "layout".to_string(), |s| s.to_string_lossy().into_owned());
    Ok((layout.with_name(name), None))
}

fn setup(common: &Common, command: &str) -> Result<Loaded> {
    if let Some(n) = common.threads {
        if n == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("cannot configure worker threads")?;
    }
    let (layout, builtin) = load_layout(&common.layout, common.gap)?;
    let mode = common
        .constants
        .map(Into::into)
        .or(layout.constants())
        .unwrap_or_default();
    let constants = PhysicalConstants::for_mode(mode);
    let mut header = vec![
        ("command".to_string(), command.to_string()),
        ("layout_source".to_string(), common.layout.clone()),
    ];
    if builtin.is_some() {
        header.push((
            "gap_nm".to_string(),
            qca_core::geometry::format_real(common.gap.map_or(DEFAULT_GAP, |g| g.0)),
        ));
    }
    Ok(Loaded { layout, builtin, constants, header })
}

fn parse_drives(items: &[String]) -> Result<Drives> {
    let mut drives = Drives::new();
    for item in items {
        let (id, value) = item
            .split_once('=')
            .ok_or_else(|| anyhow!("--drive expects ID=VALUE, got `{item}`"))?;
        let v: Sci = value.parse().map_err(|e: String| anyhow!("--drive {id}: {e}"))?;
        if drives.insert(id.to_string(), v.0).is_some() {
            bail!("cell `{id}` is driven twice");
        }
    }
    Ok(drives)
}

fn engine(common: &Common, default: EngineKind) -> Engine {
    match common.engine.unwrap_or(default) {
        EngineKind::Bistable => Engine::Bistable(common.params.bistable()),
        EngineKind::Coherence => Engine::Coherence(common.params.coherence()),
    }
}

fn describe(
    header: &mut Snapshot,
    layout: &Layout,
    engine: Option<&Engine>,
    constants: &PhysicalConstants,
    drives: &Drives,
) {
    header.push(("layout".to_string(), layout.name().to_string()));
    header.push(("constants".to_string(), constants.mode.to_string()));
    if let Some(e) = engine {
        header.push(("engine".to_string(), e.name().to_string()));
        header.extend(e.snapshot().into_iter().map(|(k, v)| (k.to_string(), v)));
    }
    for (id, v) in drives {
        header.push((format!("drive.{id}"), format!("{v:e}")));
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, bytes).with_context(|| format!("cannot write `{}`", path.display()))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn kink(common: &Common) -> Result<()> {
    let mut l = setup(common, "kink")?;
    let radius = common.params.radius.0;
    let k = kink_matrix(&l.layout, radius, &l.constants)?;
    describe(&mut l.header, &l.layout, None, &l.constants, &Drives::new());
    l.header.push(("radius_of_effect_nm".to_string(), qca_core::geometry::format_real(radius)));
    let mut buf = Vec::new();
    write_snapshot(&mut buf, &l.header)?;
    write_kink_csv(&k, &mut buf)?;
    emit(common.out.as_deref(), &buf)
}

fn simulate(common: &Common, summary: bool) -> Result<()> {
    let mut l = setup(common, "simulate")?;
    let drives = parse_drives(&common.drives)?;
    let engine = engine(common, EngineKind::Bistable);
    describe(&mut l.header, &l.layout, Some(&engine), &l.constants, &drives);
    let mut buf = Vec::new();
    write_snapshot(&mut buf, &l.header)?;
    match engine {
        Engine::Coherence(p) if !summary => {
            let k = kink_matrix(&l.layout, p.radius_of_effect, &l.constants)?;
            let trace = simulate_coherence(&l.layout, &k, &p, &drives, &l.constants)?;
            write_trace_csv(&trace, &mut buf)?;
        }
        _ => {
            let p = engine.readout(&l.layout, &l.constants, &drives)?;
            write_polarizations_csv(&p, &mut buf)?;
        }
    }
    emit(common.out.as_deref(), &buf)
}

fn default_function(kind: Option<BuiltinLayout>) -> Option<LogicFunction> {
    match kind? {
        BuiltinLayout::Inv2 | BuiltinLayout::Inv3 => Some(LogicFunction::Inverter),
        BuiltinLayout::Majority => Some(LogicFunction::Majority),
        BuiltinLayout::Wire(_) => Some(LogicFunction::Buffer),
    }
}

fn truth(common: &Common, function: Option<&str>) -> Result<()> {
    let mut l = setup(common, "truth")?;
    if !common.drives.is_empty() {
        bail!("truth drives every input itself; --drive is not accepted");
    }
    let function = match function {
        Some(f) => f.parse::<LogicFunction>().map_err(|e| anyhow!(e))?,
        None => default_function(l.builtin)
            .ok_or_else(|| anyhow!("--function is required for layout files"))?,
    };
    let engine = engine(common, EngineKind::Bistable);
    let table = truth_table_check(&l.layout, &engine, &l.constants, function)?;
    describe(&mut l.header, &l.layout, Some(&engine), &l.constants, &Drives::new());
    l.header.push(("function".to_string(), function.to_string()));
    l.header.push(("rows_passed".to_string(), format!("{}/{}", table.passed(), table.rows.len())));
    let mut buf = Vec::new();
    write_snapshot(&mut buf, &l.header)?;
    write_truth_csv(&table, &mut buf)?;
    emit(common.out.as_deref(), &buf)
}

fn parse_grid(spec: Option<&str>, default: &[f64]) -> Result<Vec<f64>> {
    match spec {
        None => Ok(default.to_vec()),
        Some("table1") => Ok(TEMPERATURE_GRID.to_vec()),
        Some("table2") | Some("table3") => Ok(GAP_GRID.to_vec()),
        Some(list) => list
            .split(',')
            .map(|v| v.parse::<Sci>().map(|s| s.0).map_err(|e| anyhow!("--grid: {e}")))
            .collect(),
    }
}

fn finish_sweep(
    common: &Common,
    sweep: &SweepArgs,
    header: Snapshot,
    mut result: SweepResult,
    table_for: impl Fn(&str) -> TableId,
) -> Result<()> {
    let mut snapshot = header;
    snapshot.append(&mut result.snapshot);
    result.snapshot = snapshot;
    let mut buf = Vec::new();
    emit_csv(&result, &mut buf)?;
    emit(common.out.as_deref(), &buf)?;

    if let Some(column) = &sweep.compare {
        let table = ReferenceTable::load(table_for(column), &sweep.data_dir)?;
        let report = compare_to_reference(&result, &table, column)?;
        let mut buf = Vec::new();
        write_comparison_csv(&report, &mut buf)?;
        match &sweep.compare_out {
            Some(path) => fs::write(path, &buf)
                .with_context(|| format!("cannot write `{}`", path.display()))?,
            None => std::io::stderr().write_all(&buf)?,
        }
    }
    Ok(())
}

fn sweep_temp(common: &Common, sweep: &SweepArgs) -> Result<()> {
    let l = setup(common, "sweep-temp")?;
    if common.engine == Some(EngineKind::Bistable) {
        bail!("sweep-temp needs the temperature-aware coherence engine");
    }
    let grid = parse_grid(sweep.grid.as_deref(), &TEMPERATURE_GRID)?;
    let drives = parse_drives(&common.drives)?;
    let result = sweep_temperature(&l.layout, &grid, &common.params.coherence(), &l.constants, &drives)?;
    finish_sweep(common, sweep, l.header, result, |_| TableId::Table1)
}

fn sweep_displacement(common: &Common, sweep: &SweepArgs, cell: Option<&str>) -> Result<()> {
    let l = setup(common, "sweep-gap")?;
    let grid = parse_grid(sweep.grid.as_deref(), &GAP_GRID)?;
    let drives = parse_drives(&common.drives)?;
    let output = match cell {
        Some(id) => id.to_string(),
        None => l.layout.sole_output()?.id().to_string(),
    };
    let engine = engine(common, EngineKind::Bistable);
    let result = sweep_gap(&l.layout, &output, &grid, &engine, &l.constants, &drives)?;
    finish_sweep(common, sweep, l.header, result, |column| {
        if column.ends_with("_Ek_J") {
            TableId::Table3
        } else {
            TableId::Table2
        }
    })
}

fn layouts(layout: Option<&str>, gap: Option<Sci>) -> Result<()> {
    let text = match layout {
        Some(spec) => serialize_layout(&load_layout(spec, gap)?.0),
        None => {
            if gap.is_some() {
                bail!("--gap needs --layout");
            }
            let mut s = String::new();
            for (name, about) in [
                ("inv2", "two-cell diagonal inverter"),
                ("inv3", "three-cell inverter, output diagonal to input and middle cell"),
                ("majority", "three-input majority gate"),
                ("wireN", "straight wire of N >= 2 cells, e.g. wire5"),
            ] {
                s.push_str(&format!("builtin:{name}\t{about}\n"));
            }
            s
        }
    };
    emit(None, text.as_bytes())
}
