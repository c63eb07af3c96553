use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use spectraforge_core::gcl::block_features;
use spectraforge_core::graph::{format_edge_list, generate_sbm};

use super::{core, Check};
use crate::report::to_csv;
use crate::{run, EXIT_OK};

/// Scratch directory removed on drop.
struct Scratch(PathBuf);

impl Scratch {
    fn new() -> Result<Self, String> {
        static COUNTER: AtomicU64 = AtomicU64::new(0);
        let dir = std::env::temp_dir().join(format!(
            "spectraforge-verify-{}-{}",
            std::process::id(),
            COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
        Ok(Self(dir))
    }

    fn path(&self, name: &str) -> String {
        self.0.join(name).display().to_string()
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.0);
    }
}

fn invoke(args: &[&str]) -> Result<(), String> {
    let mut argv = vec!["spectraforge"];
    argv.extend_from_slice(args);
    match run(argv) {
        EXIT_OK => Ok(()),
        code => Err(format!("`{}` exited with {code}", args.join(" "))),
    }
}

fn same_bytes(a: &str, b: &str) -> Result<bool, String> {
    let read = |p: &str| fs::read(Path::new(p)).map_err(|e| format!("{p}: {e}"));
    Ok(read(a)? == read(b)?)
}

pub(super) fn determinism() -> Check {
    let dir = Scratch::new()?;
    let g = core(generate_sbm(&[10, 10], 0.5, 0.1, 3))?;
    let labels = g.labels().unwrap_or_default().to_vec();
    let x = core(block_features(&labels, 4, 1.0, 3))?;
    let (graph, feats, labs) = (dir.path("g.edges"), dir.path("x.csv"), dir.path("y.csv"));
    fs::write(&graph, format_edge_list(&g)).map_err(|e| e.to_string())?;
    fs::write(&feats, to_csv(&x)).map_err(|e| e.to_string())?;
    let mut label_text = String::from("node,label\n");
    for (i, l) in labels.iter().enumerate() {
        label_text += &format!("{i},{l}\n");
    }
    fs::write(&labs, label_text).map_err(|e| e.to_string())?;

    let (t1, v1, t2, v2) = (dir.path("t1.jsonl"), dir.path("v1.edges"), dir.path("t2.jsonl"), dir.path("v2.edges"));
    invoke(&["spco", "--graph", &graph, "--epochs", "4", "--seed", "11", "--out-trace", &t1, "--out-graph", &v1])?;
    let manifest = format!("{t1}.manifest.json");
    invoke(&["spco", "--config", &manifest, "--out-trace", &t2, "--out-graph", &v2])?;
    let spco_same = same_bytes(&t1, &t2)? && same_bytes(&v1, &v2)? && same_bytes(&manifest, &format!("{t2}.manifest.json"))?;

    let (m1, e1, m2, e2) = (dir.path("m1.json"), dir.path("e1.csv"), dir.path("m2.json"), dir.path("e2.csv"));
    invoke(&[
        "train", "--graph", &graph, "--features", &feats, "--labels", &labs, "--view", "edge-drop",
        "--epochs", "20", "--train-per-class", "3", "--seed", "11", "--out", &m1, "--embeddings", &e1,
    ])?;
    invoke(&["train", "--config", &m1, "--out", &m2, "--embeddings", &e2])?;
    let train_same = same_bytes(&m1, &m2)? && same_bytes(&e1, &e2)?;

    Ok((
        spco_same && train_same,
        format!("spco replay identical: {spco_same}; train replay identical: {train_same}"),
    ))
}
