//! Plain-text graph formats.
//!
//! Edge lists start with a `# N=<n>` header followed by one `u v` pair per
//! line, 0-indexed. Satellite node data is CSV with header `node,x,y,p`.

use std::io::{BufRead, Write};

use super::Network;
use crate::error::{Error, Result};
use crate::output::fmt_sig9;

pub fn write_edge_list<W: Write>(net: &Network, mut out: W) -> Result<()> {
    writeln!(out, "# N={}", net.node_count())?;
    for (u, v) in net.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

pub fn read_edge_list<R: BufRead>(input: R) -> Result<Network> {
    let mut n = None;
    let mut edges = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        let parse_err = |msg: String| Error::Parse { line: i + 1, msg };
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(v) = rest.trim().strip_prefix("N=") {
                n = Some(v.trim().parse::<usize>().map_err(|e| parse_err(e.to_string()))?);
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let mut next = || -> Result<usize> {
            it.next()
                .ok_or_else(|| parse_err("expected two node ids".into()))?
                .parse()
                .map_err(|e: std::num::ParseIntError| parse_err(e.to_string()))
        };
        edges.push((next()?, next()?));
    }
    let n = n.ok_or(Error::Parse { line: 1, msg: "missing '# N=<n>' header".into() })?;
    Network::from_edges(n, edges)
}

pub fn write_node_table<W: Write>(positions: &[(f64, f64)], accept: &[f64], mut out: W) -> Result<()> {
    writeln!(out, "node,x,y,p")?;
    for (i, (&(x, y), &p)) in positions.iter().zip(accept).enumerate() {
        writeln!(out, "{i},{},{},{}", fmt_sig9(x), fmt_sig9(y), fmt_sig9(p))?;
    }
    Ok(())
}

/// Reads the `p` column of a `node,x,y,p` table (any column order, header
/// required), returning acceptances indexed by node id.
pub fn read_node_acceptance<R: BufRead>(input: R) -> Result<Vec<f64>> {
    let mut lines = input.lines();
    let header = lines.next().ok_or(Error::Empty("node table"))??;
    let cols: Vec<&str> = header.trim().split(',').map(str::trim).collect();
    let find = |name: &str| {
        cols.iter()
            .position(|c| *c == name)
            .ok_or(Error::Parse { line: 1, msg: format!("missing column '{name}'") })
    };
    let (node_col, p_col) = (find("node")?, find("p")?);
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let err = |msg: String| Error::Parse { line: i + 2, msg };
        let node: usize = fields.get(node_col).ok_or_else(|| err("short row".into()))?.parse().map_err(|e| err(format!("{e}")))?;
        let p: f64 = fields.get(p_col).ok_or_else(|| err("short row".into()))?.parse().map_err(|e| err(format!("{e}")))?;
        rows.push((node, p));
    }
    let mut out = vec![f64::NAN; rows.len()];
    for (node, p) in rows {
        let slot = out.get_mut(node).ok_or(Error::Parse { line: 0, msg: format!("node id {node} out of range") })?;
        *slot = p;
    }
    if out.iter().any(|p| p.is_nan()) {
        return Err(Error::Parse { line: 0, msg: "node ids are not 0..n".into() });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_ust;
    use crate::rng::seeded;

    #[test]
    fn edge_list_round_trip() {
        let net = generate_ust(40, &mut seeded(1));
        let mut buf = Vec::new();
        write_edge_list(&net, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# N=40\n"));
        assert_eq!(text.lines().count(), 40);
        let back = read_edge_list(buf.as_slice()).unwrap();
        assert_eq!(back.edges().collect::<Vec<_>>(), net.edges().collect::<Vec<_>>());
    }

    #[test]
    fn edge_list_keeps_isolated_nodes_and_rejects_junk() {
        let net = read_edge_list("# N=5\n0 1\n\n3 4\n".as_bytes()).unwrap();
        assert_eq!((net.node_count(), net.component_count()), (5, 3));
        assert!(read_edge_list("0 1\n".as_bytes()).is_err());
        assert!(read_edge_list("# N=3\n0 x\n".as_bytes()).is_err());
        assert!(read_edge_list("# N=3\n0 1\n1 0\n".as_bytes()).is_err());
    }

    #[test]
    fn node_table_round_trip() {
        let pos = vec![(0.5, -1.25), (3.0, 4.0)];
        let p = vec![0.1, 0.025];
        let mut buf = Vec::new();
        write_node_table(&pos, &p, &mut buf).unwrap();
        assert_eq!(read_node_acceptance(buf.as_slice()).unwrap(), p);
    }
}
