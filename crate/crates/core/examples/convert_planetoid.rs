//! Convert the LINQS release of Cora or CiteSeer (`<name>.content`,
//! `<name>.cites`) into the `edges.tsv` / `features.tsv` layout.
//!
//! cargo run --release --example convert_planetoid -- /path/to/cora cora /path/to/out/cora
//!
//! Papers are numbered in file order. Citations that mention a paper
//! missing from the content file are dropped, as are self-citations.

use std::collections::HashMap;
use std::fs;
use std::path::PathBuf;

use ndarray::Array2;
use slgad::{Error, Graph};

fn main() -> slgad::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let [src, name, out] = args.as_slice() else {
        eprintln!("usage: convert_planetoid <src dir> <name> <out dir>");
        std::process::exit(2);
    };
    let src = PathBuf::from(src);
    let read = |ext: &str| {
        let path = src.join(format!("{name}.{ext}"));
        fs::read_to_string(&path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    };

    let content = read("content")?;
    let rows: Vec<Vec<&str>> = content.lines().map(|l| l.split_whitespace().collect()).filter(|r: &Vec<&str>| r.len() > 2).collect();
    let d = rows[0].len() - 2;
    let ids: HashMap<&str, usize> = rows.iter().enumerate().map(|(i, r)| (r[0], i)).collect();
    let mut features = Array2::zeros((rows.len(), d));
    for (i, r) in rows.iter().enumerate() {
        for (j, v) in r[1..=d].iter().enumerate() {
            features[[i, j]] = v.parse::<f64>().map_err(|e| Error::Config(format!("row {i}: {e}")))?;
        }
    }

    let cites = read("cites")?;
    let mut dropped = 0;
    let edges: Vec<(usize, usize)> = cites
        .lines()
        .filter_map(|l| {
            let mut it = l.split_whitespace();
            let (a, b) = (it.next()?, it.next()?);
            match (ids.get(a), ids.get(b)) {
                (Some(&u), Some(&v)) if u != v => Some((u, v)),
                _ => {
                    dropped += 1;
                    None
                }
            }
        })
        .collect();

    let graph = Graph::new(edges, features, None)?;
    graph.save(out)?;
    println!(
        "{}: {} nodes, {} edges, {} features ({dropped} citation lines dropped) -> {out}",
        name,
        graph.n_nodes(),
        graph.n_edges(),
        d
    );
    Ok(())
}
