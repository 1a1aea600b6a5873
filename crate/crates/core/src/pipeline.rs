//! The whole tool as a library call: sources in, completed sources out.

use std::fmt::Write as _;
use std::path::Path;

use indexmap::IndexMap;
use thiserror::Error;

use crate::classtable::{build_class_table, tag_name, ClassTable, ClassTableError};
use crate::decode::{apply_solution, unparse, unparse_sketch, IncompleteSolutionError, Replacement};
use crate::desugar::{assign_unknown_ids, normalize, specialize_class_generators, DesugarError, SpecializationMap, UnknownBounds};
use crate::engine::{format_solution, solve, verify_solution, EngineConfig, SolveError, Solution};
use crate::frontend::{parse_program, parse_sources, FrontendError, SketchAst};
use crate::lowering::{lower_program, IrProgram, LoweringError};
use crate::unknowns::{UnknownKind, UnknownRegistry};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Frontend(#[from] FrontendError),
    #[error(transparent)]
    Desugar(#[from] DesugarError),
    #[error(transparent)]
    ClassTable(#[from] ClassTableError),
    #[error(transparent)]
    Lowering(#[from] LoweringError),
    #[error("no solution exists within the search bounds ({candidates} solver queries)")]
    Unsat { candidates: u64 },
    #[error("timed out after {candidates} solver queries")]
    Timeout { candidates: u64 },
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// 0 solved, 1 unsat, 2 input error, 3 timeout, 4 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Unsat { .. } => 1,
            Error::Frontend(_) | Error::Desugar(_) | Error::ClassTable(_) | Error::Lowering(_) => 2,
            Error::Timeout { .. } => 3,
            Error::Internal(_) => 4,
        }
    }
}

impl From<SolveError> for Error {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Unsat { candidates } => Error::Unsat { candidates },
            SolveError::Timeout { candidates } => Error::Timeout { candidates },
            SolveError::Internal(m) => Error::Internal(m),
        }
    }
}

impl From<IncompleteSolutionError> for Error {
    fn from(e: IncompleteSolutionError) -> Self {
        Error::Internal(e.to_string())
    }
}

#[derive(Clone, Debug, Default)]
pub struct Options {
    pub bounds: UnknownBounds,
    pub engine: EngineConfig,
}

/// Timestamped stage markers followed by free-form debug lines.
#[derive(Clone, Debug, Default)]
pub struct StageLog {
    pub lines: Vec<String>,
    /// Also print each line to stderr.
    pub echo: bool,
}

impl StageLog {
    pub fn stage(&mut self, name: &str) {
        self.push(format!("{} {}", chrono::Local::now().format("%H:%M:%S"), name));
    }

    pub fn push(&mut self, line: String) {
        if self.echo {
            eprintln!("{line}");
        }
        self.lines.push(line);
    }

    pub fn text(&self) -> String {
        self.lines.iter().map(|l| format!("{l}\n")).collect()
    }
}

/// Everything known about a sketch before solving.
#[derive(Clone, Debug)]
pub struct Compiled {
    /// Specialized AST with unknown ids; the target of decoding.
    pub sketch: SketchAst,
    pub specializations: SpecializationMap,
    /// Flattened, sugar-free AST that lowering consumes.
    pub normalized: SketchAst,
    /// The registry as refined by lowering; equal to `ir.registry`.
    pub registry: UnknownRegistry,
    pub table: ClassTable,
    pub ir: IrProgram,
}

/// Desugars, builds the class table and lowers.
pub fn compile(ast: &SketchAst, bounds: UnknownBounds, log: &mut StageLog) -> Result<Compiled, Error> {
    log.stage("rewriting syntax sugar");
    log.stage("specializing class-level generator");
    let (specialized, specializations) = specialize_class_generators(ast)?;
    let (sketch, registry) = assign_unknown_ids(&specialized, bounds);
    let normalized = normalize(&sketch)?;
    log.stage("building class hierarchy");
    let table = build_class_table(&normalized)?;
    log.stage("encoding");
    let ir = lower_program(&normalized, &table, &registry)?;
    // lowering marks boolean-position holes
    let registry = ir.registry.clone();
    Ok(Compiled { sketch, specializations, normalized, registry, table, ir })
}

/// A solved sketch.
#[derive(Clone, Debug)]
pub struct Synthesis {
    pub compiled: Compiled,
    pub solution: Solution,
    /// Contents of `solution.txt`.
    pub solution_text: String,
    pub concrete: SketchAst,
    pub replacements: Vec<Replacement>,
    /// Output file name to source text.
    pub files: IndexMap<String, String>,
}

/// Solves a compiled sketch and decodes the result.
pub fn solve_compiled(compiled: Compiled, cfg: &EngineConfig, log: &mut StageLog) -> Result<Synthesis, Error> {
    log.stage("solving");
    let solution = solve(&compiled.ir, cfg)?;
    if !verify_solution(&compiled.ir, &solution, &cfg.limits) {
        return Err(Error::Internal("solution fails concrete replay".into()));
    }
    let solution_text = format_solution(&solution, &compiled.registry);
    let (concrete, replacements) = apply_solution(&compiled.sketch, &compiled.registry, &solution.assignment)?;
    log.stage("replacing holes");
    for r in replacements.iter().filter(|r| r.kind == UnknownKind::Hole) {
        log.push(r.to_string());
    }
    log.stage("replacing generators");
    for r in replacements.iter().filter(|r| r.kind != UnknownKind::Hole) {
        log.push(r.to_string());
    }
    log.stage("decoding");
    let files = unparse(&concrete)
        .into_iter()
        .map(|(path, text)| (file_name(&path), text))
        .collect();
    log.stage("synthesis done");
    Ok(Synthesis { compiled, solution, solution_text, concrete, replacements, files })
}

/// Full pipeline over in-memory `(file name, text)` sources.
pub fn synthesize_sources<S: AsRef<str>, T: AsRef<str>>(
    sources: &[(S, T)],
    opts: &Options,
    log: &mut StageLog,
) -> Result<Synthesis, Error> {
    let ast = parse_sources(sources)?;
    let compiled = compile(&ast, opts.bounds, log)?;
    solve_compiled(compiled, &opts.engine, log)
}

/// Full pipeline over files on disk.
pub fn synthesize_files<P: AsRef<Path>>(files: &[P], opts: &Options, log: &mut StageLog) -> Result<Synthesis, Error> {
    let ast = parse_program(files)?;
    let compiled = compile(&ast, opts.bounds, log)?;
    solve_compiled(compiled, &opts.engine, log)
}

/// Last path component; output files keep their input names.
pub fn file_name(path: &str) -> String {
    Path::new(path).file_name().map_or_else(|| path.to_string(), |n| n.to_string_lossy().into_owned())
}

/// Normalized sources, unknowns kept, keyed by output file name.
pub fn desugared_sources(compiled: &Compiled) -> IndexMap<String, String> {
    unparse_sketch(&compiled.normalized).into_iter().map(|(p, t)| (file_name(&p), t)).collect()
}

/// Human-readable dump of the class table.
pub fn format_tables(table: &ClassTable) -> String {
    let classes = &table.classes;
    let mut s = String::new();
    let _ = writeln!(s, "classes");
    for c in classes {
        let sup = c.superclass.map_or_else(|| "-".to_string(), |id| classes[id as usize].name.clone());
        let ifaces: Vec<&str> = c.interfaces.iter().map(|&i| classes[i as usize].name.as_str()).collect();
        let kind = if c.is_interface { "interface" } else { "class" };
        let _ = writeln!(s, "  {} {} {} extends {} implements [{}]", c.id, kind, c.name, sup, ifaces.join(", "));
    }
    let _ = writeln!(s, "subcls");
    for (i, row) in table.subcls.iter().enumerate() {
        let bits: String = row.iter().map(|&b| if b { '1' } else { '0' }).collect();
        let _ = writeln!(s, "  {} {}", classes[i].name, bits);
    }
    let _ = writeln!(s, "fields");
    for (i, f) in table.field_layout.iter().enumerate() {
        let st = if f.is_static { " static" } else { "" };
        let _ = writeln!(
            s,
            "  {} {}.{} : {}{}",
            i,
            classes[f.owner as usize].name,
            f.name,
            tag_name(f.ty, classes),
            st
        );
    }
    let _ = writeln!(s, "methods");
    for m in &table.methods {
        let params: Vec<String> = m.params.iter().map(|&p| tag_name(p, classes)).collect();
        let _ = writeln!(
            s,
            "  {} {} ({}) -> {}",
            m.id,
            m.mangled,
            params.join(", "),
            tag_name(m.ret, classes)
        );
    }
    let _ = writeln!(s, "vtables");
    for (i, vt) in table.vtable.iter().enumerate() {
        for (sig, &mid) in vt {
            let _ = writeln!(s, "  {}.{} -> {}", classes[i].name, sig.name, table.methods[mid].mangled);
        }
    }
    s
}
