//! Graph directories: a `schema.json` plus one `<relation>.edges` per relation.
//!
//! Edge files hold one `<src_id> <dst_id>` pair per line in decimal. Blank
//! lines and lines starting with `#` are skipped.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use super::{HetGraph, Schema};
use crate::error::{Error, Result};

pub const SCHEMA_FILE: &str = "schema.json";
pub const EDGES_EXT: &str = "edges";

/// A parsed edge line together with its 1-based line number.
pub type NumberedEdge = (usize, u64, u64);

pub fn read_schema(path: &Path) -> Result<Schema> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_edge_file(path: &Path) -> Result<Vec<NumberedEdge>> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<u64> {
            let tok = tok.ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line: lineno,
                msg: "expected `<src_id> <dst_id>`".into(),
            })?;
            tok.parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: lineno,
                msg: format!("malformed vertex id `{tok}`"),
            })
        };
        let u = parse(fields.next())?;
        let v = parse(fields.next())?;
        if fields.next().is_some() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: lineno,
                msg: "trailing fields after `<src_id> <dst_id>`".into(),
            });
        }
        out.push((lineno, u, v));
    }
    Ok(out)
}

/// Reads an edge file and bounds-checks it against the endpoint types.
pub fn read_typed_edges(
    path: &Path,
    src_type: &str,
    n_src: u32,
    dst_type: &str,
    n_dst: u32,
) -> Result<Vec<(u32, u32)>> {
    let raw = read_edge_file(path)?;
    let mut edges = Vec::with_capacity(raw.len());
    for (line, u, v) in raw {
        for (id, count, ty) in [(u, n_src, src_type), (v, n_dst, dst_type)] {
            if id >= u64::from(count) {
                return Err(Error::IdOutOfRange {
                    path: path.to_path_buf(),
                    line,
                    id,
                    count,
                    vertex_type: ty.to_string(),
                });
            }
        }
        edges.push((u as u32, v as u32));
    }
    Ok(edges)
}

pub fn write_edge_file(path: &Path, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for (u, v) in edges {
        writeln!(w, "{u} {v}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn edge_path(dir: &Path, relation: &str) -> PathBuf {
    dir.join(format!("{relation}.{EDGES_EXT}"))
}

pub fn load_graph(dir: &Path) -> Result<HetGraph> {
    let schema = read_schema(&dir.join(SCHEMA_FILE))?;
    let mut lists = Vec::with_capacity(schema.relations.len());
    for rel in &schema.relations {
        let find = |name: &str| {
            schema
                .vertex_types
                .iter()
                .find(|t| t.name == name)
                .ok_or_else(|| Error::Schema(format!("relation endpoint `{name}` is not a vertex type")))
        };
        let src = find(&rel.src)?;
        let dst = find(&rel.dst)?;
        let path = edge_path(dir, &rel.name);
        lists.push(read_typed_edges(&path, &src.name, src.count, &dst.name, dst.count)?);
    }
    warn_unknown_edge_files(dir, &schema);
    HetGraph::from_edge_lists(&schema, lists)
}

fn warn_unknown_edge_files(dir: &Path, schema: &Schema) {
    let Ok(entries) = fs::read_dir(dir) else {
        return;
    };
    for entry in entries.flatten() {
        let path = entry.path();
        if path.extension().and_then(|e| e.to_str()) != Some(EDGES_EXT) {
            continue;
        }
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
        if !schema.relations.iter().any(|r| r.name == stem) {
            log::warn!("ignoring {}: no relation `{stem}` in schema", path.display());
        }
    }
}

pub fn write_json<T: serde::Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn save_graph(graph: &HetGraph, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_json(&dir.join(SCHEMA_FILE), &graph.schema())?;
    for (i, rel) in graph.relations().iter().enumerate() {
        write_edge_file(&edge_path(dir, &rel.name), graph.adjacency(i).edges())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_tiny(dir: &Path, edges: &str) {
        fs::write(
            dir.join(SCHEMA_FILE),
            r#"{"vertex_types":[{"name":"A","count":2,"feature_dim":8},{"name":"P","count":1,"feature_dim":8}],
                "relations":[{"name":"AP","src":"A","dst":"P"}]}"#,
        )
        .unwrap();
        fs::write(dir.join("AP.edges"), edges).unwrap();
    }

    #[test]
    fn loads_minimal_graph() {
        let tmp = tempfile::tempdir().unwrap();
        write_tiny(tmp.path(), "0 0\n1 0\n");
        let g = load_graph(tmp.path()).unwrap();
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn dedups_on_load() {
        let tmp = tempfile::tempdir().unwrap();
        write_tiny(tmp.path(), "# comment\n0 0\n0 0\n");
        assert_eq!(load_graph(tmp.path()).unwrap().edge_count(), 1);
    }

    #[test]
    fn out_of_range_reports_line() {
        let tmp = tempfile::tempdir().unwrap();
        write_tiny(tmp.path(), "0 0\n5 0\n");
        let err = load_graph(tmp.path()).unwrap_err();
        assert!(matches!(err, Error::IdOutOfRange { line: 2, id: 5, .. }));
        assert!(err.to_string().contains("id out of range"));
    }

    #[test]
    fn malformed_line_reports_file_and_line() {
        let tmp = tempfile::tempdir().unwrap();
        write_tiny(tmp.path(), "0 0\n1 x\n");
        let err = load_graph(tmp.path()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("AP.edges:2"), "{msg}");
        write_tiny(tmp.path(), "0\n");
        assert!(matches!(load_graph(tmp.path()), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn missing_edge_file() {
        let tmp = tempfile::tempdir().unwrap();
        write_tiny(tmp.path(), "");
        fs::remove_file(tmp.path().join("AP.edges")).unwrap();
        assert!(matches!(load_graph(tmp.path()), Err(Error::MissingFile(_))));
        assert!(matches!(
            load_graph(&tmp.path().join("nope")),
            Err(Error::MissingFile(_))
        ));
    }

    #[test]
    fn unknown_edge_file_is_ignored() {
        let tmp = tempfile::tempdir().unwrap();
        write_tiny(tmp.path(), "0 0\n");
        fs::write(tmp.path().join("XY.edges"), "garbage\n").unwrap();
        assert_eq!(load_graph(tmp.path()).unwrap().edge_count(), 1);
    }

    #[test]
    fn empty_graph_round_trip() {
        let tmp = tempfile::tempdir().unwrap();
        let schema = Schema {
            vertex_types: vec![],
            relations: vec![],
        };
        let g = HetGraph::from_edge_lists(&schema, vec![]).unwrap();
        save_graph(&g, tmp.path()).unwrap();
        let names: Vec<_> = fs::read_dir(tmp.path()).unwrap().flatten().map(|e| e.file_name()).collect();
        assert_eq!(names, vec![std::ffi::OsString::from(SCHEMA_FILE)]);
        assert_eq!(load_graph(tmp.path()).unwrap(), g);
    }
}
