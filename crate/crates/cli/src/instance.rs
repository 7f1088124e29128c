//! Graph arguments: generator specs or edge-list files.
//!
//! | form                                   | graph                        |
//! |----------------------------------------|------------------------------|
//! | `chimera:L,M,N`                        | `C_{L,M,N}`                  |
//! | `pegasus:M,N`                          | `P_{4,M,N,3}` stand-in       |
//! | `er:NU,P[,SEED]`                       | Erdős–Rényi `G(ν, p)`        |
//! | `structured:ZETA,PINTER,PINTRA[,SEED[,CELLS]]` | contracted-biclique family |
//! | `complete:N`, `path:N`, `cycle:N`      | the named graph              |
//! | `bipartite:A,B`                        | `K_{A,B}`                    |
//! | `illustrative`                         | the two-cell worked instance |
//! | anything else                          | edge-list file path          |
//!
//! A missing `SEED` falls back to the run seed.

use std::path::Path;

use anyhow::{bail, Context, Result};
use minorcast::topology::{
    gen_chimera, gen_erdos_renyi, gen_pegasus, gen_structured, illustrative_example, ChimeraSpec, ErdosRenyiSpec,
    PegasusSpec, StructuredCells, StructuredSpec,
};
use minorcast::{load_graph, Graph};

const GENERATORS: &[&str] =
    &["chimera", "pegasus", "er", "structured", "complete", "path", "cycle", "bipartite", "illustrative"];

fn fields<T: std::str::FromStr>(kind: &str, args: &str, min: usize, max: usize) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    let parts: Vec<&str> = if args.is_empty() { Vec::new() } else { args.split(',').map(str::trim).collect() };
    if parts.len() < min || parts.len() > max {
        let want = if min == max { min.to_string() } else { format!("{min} to {max}") };
        bail!("`{kind}` takes {want} comma-separated values, got {}", parts.len());
    }
    parts.iter().map(|p| p.parse::<T>().map_err(|e| anyhow::anyhow!("`{kind}`: bad value `{p}`: {e}"))).collect()
}

fn cells(v: f64) -> Result<StructuredCells> {
    match v as u64 {
        2 if v == 2.0 => Ok(StructuredCells::Two),
        4 if v == 4.0 => Ok(StructuredCells::Four),
        _ => bail!("`structured`: cells must be 2 or 4, got {v}"),
    }
}

/// Resolves a graph argument. `seed` fills in omitted generator seeds.
pub fn resolve_graph(arg: &str, seed: u64) -> Result<Graph> {
    let (kind, args) = arg.split_once(':').unwrap_or((arg, ""));
    if !GENERATORS.contains(&kind) || (kind != "illustrative" && !arg.contains(':')) {
        return load_file(Path::new(arg));
    }
    let g = match kind {
        "chimera" => {
            let v: Vec<usize> = fields(kind, args, 3, 3)?;
            gen_chimera(ChimeraSpec::new(v[0], v[1], v[2]))?
        }
        "pegasus" => {
            let v: Vec<usize> = fields(kind, args, 2, 2)?;
            gen_pegasus(PegasusSpec::new(v[0], v[1]))?
        }
        "er" => {
            let v: Vec<f64> = fields(kind, args, 2, 3)?;
            let seed = v.get(2).map_or(seed, |&s| s as u64);
            gen_erdos_renyi(ErdosRenyiSpec { nu: v[0] as usize, p: v[1], seed })?
        }
        "structured" => {
            let v: Vec<f64> = fields(kind, args, 3, 5)?;
            gen_structured(StructuredSpec {
                zeta: v[0] as usize,
                p_inter: v[1],
                p_intra: v[2],
                seed: v.get(3).map_or(seed, |&s| s as u64),
                cells: v.get(4).map_or(Ok(StructuredCells::Two), |&c| cells(c))?,
            })?
        }
        "complete" => Graph::complete(fields::<usize>(kind, args, 1, 1)?[0]),
        "path" => Graph::path(fields::<usize>(kind, args, 1, 1)?[0]),
        "cycle" => {
            let n = fields::<usize>(kind, args, 1, 1)?[0];
            if n < 3 {
                bail!("`cycle` needs at least 3 vertices");
            }
            Graph::cycle(n)
        }
        "bipartite" => {
            let v: Vec<usize> = fields(kind, args, 2, 2)?;
            Graph::complete_bipartite(v[0], v[1])
        }
        "illustrative" => {
            if !args.is_empty() {
                bail!("`illustrative` takes no parameters");
            }
            illustrative_example()
        }
        _ => unreachable!(),
    };
    Ok(g)
}

pub fn load_file(path: &Path) -> Result<Graph> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading graph file {}", path.display()))?;
    load_graph(&text).with_context(|| format!("parsing graph file {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_specs() {
        assert_eq!(resolve_graph("chimera:4,1,2", 0).unwrap().num_vertices(), 16);
        assert_eq!(resolve_graph("pegasus:1,1", 0).unwrap().num_vertices(), 24);
        assert_eq!(resolve_graph("er:6,1", 0).unwrap().num_edges(), 15);
        assert_eq!(resolve_graph("complete:4", 0).unwrap().num_edges(), 6);
        assert_eq!(resolve_graph("bipartite:2,3", 0).unwrap().num_edges(), 6);
        assert_eq!(resolve_graph("illustrative", 0).unwrap().num_vertices(), 12);
        assert_eq!(resolve_graph("structured:0,1,1", 0).unwrap().num_edges(), 36);
    }

    #[test]
    fn seeds_fall_back() {
        let a = resolve_graph("er:9,0.5", 11).unwrap();
        let b = resolve_graph("er:9,0.5,11", 0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bad_specs() {
        assert!(resolve_graph("chimera:4,1", 0).is_err());
        assert!(resolve_graph("structured:1,0.5,0.5,1,3", 0).is_err());
        assert!(resolve_graph("cycle:2", 0).is_err());
        assert!(resolve_graph("/nonexistent/graph.txt", 0).is_err());
    }
}
