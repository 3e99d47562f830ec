//! Line-oriented sample export.

use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::model::{Edge, GraphState};
use crate::perfect::PerfectSample;

/// `[x1, y1, x2, y2]` with the smaller endpoint first.
pub fn edge_quad(e: Edge) -> [i64; 4] {
    let (a, b) = e.endpoints();
    [a.x, a.y, b.x, b.y]
}

#[derive(Serialize)]
struct Line {
    replica: usize,
    edges: Vec<[i64; 4]>,
}

/// One JSON object per line: `{"replica": i, "edges": [[x1,y1,x2,y2], ...]}`,
/// preceded by `{"header": ...}` when a header is given.
pub fn write_graphs_ndjson<'a, H: Serialize>(
    header: Option<&H>,
    graphs: impl IntoIterator<Item = &'a GraphState>,
    mut out: impl Write,
) -> Result<()> {
    if let Some(h) = header {
        #[derive(Serialize)]
        struct Header<'h, H> {
            header: &'h H,
        }
        serde_json::to_writer(&mut out, &Header { header: h }).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    for (replica, g) in graphs.into_iter().enumerate() {
        let line = Line { replica, edges: g.edges().map(edge_quad).collect() };
        serde_json::to_writer(&mut out, &line).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_samples_ndjson<H: Serialize>(
    header: Option<&H>,
    samples: &[PerfectSample],
    out: impl Write,
) -> Result<()> {
    write_graphs_ndjson(header, samples.iter().map(|s| &s.graph), out)
}
