//! Docking backends used by the redocking loop.
//!
//! The external-command backend speaks JSON over stdin/stdout. The request
//! is `{"protein_pdb": str, "ligand_sdf": str, "seed": u64}` and the
//! response must be `{"ligand_sdf_posed": str}` holding the same atoms in
//! the same order.

use std::collections::VecDeque;
use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Stdio};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chem::{parse_sdf, write_pdb, write_sdf, ChemError, MolecularStructure};
use crate::Point;

#[derive(Debug, Error)]
pub enum BackendError {
    #[error("cannot run {command}: {source}")]
    Spawn {
        command: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{command} exited with {status}: {stderr}")]
    Exit {
        command: String,
        status: String,
        stderr: String,
    },
    #[error("malformed backend response: {0}")]
    Protocol(String),
    #[error("posed ligand does not match the input topology: {0}")]
    Topology(String),
    #[error("posed ligand is not valid SDF: {0}")]
    Parse(#[from] ChemError),
    #[error("unknown backend spec `{0}`; expected cmd:PATH")]
    UnknownSpec(String),
    #[error("scripted backend has no poses left")]
    Exhausted,
}

pub trait DockingBackend {
    /// New coordinates for `ligand`'s atoms, in its atom order.
    fn dock(
        &mut self,
        protein: &MolecularStructure,
        ligand: &MolecularStructure,
        seed: u64,
    ) -> Result<Vec<Point>, BackendError>;
}

/// Replays a fixed list of poses; records the seeds it was called with.
#[derive(Debug, Clone, Default)]
pub struct ScriptedBackend {
    poses: VecDeque<Vec<Point>>,
    pub seeds: Vec<u64>,
}

impl ScriptedBackend {
    pub fn new(poses: Vec<Vec<Point>>) -> Self {
        Self {
            poses: poses.into(),
            seeds: Vec::new(),
        }
    }
}

impl DockingBackend for ScriptedBackend {
    fn dock(&mut self, _: &MolecularStructure, _: &MolecularStructure, seed: u64) -> Result<Vec<Point>, BackendError> {
        self.seeds.push(seed);
        self.poses.pop_front().ok_or(BackendError::Exhausted)
    }
}

#[derive(Debug, Serialize)]
struct Request<'a> {
    protein_pdb: &'a str,
    ligand_sdf: &'a str,
    seed: u64,
}

#[derive(Debug, Deserialize)]
struct Response {
    ligand_sdf_posed: String,
}

/// Runs an executable once per docking call.
#[derive(Debug, Clone)]
pub struct CommandBackend {
    pub program: PathBuf,
}

impl CommandBackend {
    /// Parses a `cmd:PATH` backend spec.
    pub fn from_spec(spec: &str) -> Result<Self, BackendError> {
        match spec.strip_prefix("cmd:") {
            Some(path) if !path.is_empty() => Ok(Self { program: path.into() }),
            _ => Err(BackendError::UnknownSpec(spec.to_string())),
        }
    }
}

/// Checks that a posed ligand keeps the input's atoms and order.
pub fn check_topology(input: &MolecularStructure, posed: &MolecularStructure) -> Result<(), BackendError> {
    if input.len() != posed.len() {
        return Err(BackendError::Topology(format!(
            "{} atoms in, {} atoms out",
            input.len(),
            posed.len()
        )));
    }
    if let Some(i) = (0..input.len()).find(|&i| input.atoms[i].element != posed.atoms[i].element) {
        return Err(BackendError::Topology(format!("element differs at atom {}", i + 1)));
    }
    Ok(())
}

impl DockingBackend for CommandBackend {
    fn dock(
        &mut self,
        protein: &MolecularStructure,
        ligand: &MolecularStructure,
        seed: u64,
    ) -> Result<Vec<Point>, BackendError> {
        let command = self.program.display().to_string();
        let body = serde_json::to_vec(&Request {
            protein_pdb: &write_pdb(protein),
            ligand_sdf: &write_sdf(ligand, "ligand"),
            seed,
        })
        .expect("request serializes");
        let spawn_err = |source| BackendError::Spawn {
            command: command.clone(),
            source,
        };
        let mut child = Command::new(&self.program)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(spawn_err)?;
        let mut stdin = child.stdin.take().expect("stdin is piped");
        // write from a separate thread so a chatty child cannot deadlock us
        let writer = std::thread::spawn(move || stdin.write_all(&body));
        let output = child.wait_with_output().map_err(spawn_err)?;
        // a child that exits without reading its input yields a broken pipe
        let _ = writer.join();
        if !output.status.success() {
            return Err(BackendError::Exit {
                command,
                status: output.status.to_string(),
                stderr: String::from_utf8_lossy(&output.stderr).trim().to_string(),
            });
        }
        let response: Response =
            serde_json::from_slice(&output.stdout).map_err(|e| BackendError::Protocol(e.to_string()))?;
        let posed = parse_sdf(response.ligand_sdf_posed.as_bytes())?;
        check_topology(ligand, &posed)?;
        Ok(posed.positions())
    }
}
