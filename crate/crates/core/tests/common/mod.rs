#![allow(dead_code)]

use std::path::PathBuf;

use atomcert::{parse_diagram, Diagram, GaussCode, GaussEntry, Passage, Sign};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

/// Every corpus diagram, sorted by file name.
pub fn corpus() -> Vec<(String, Diagram)> {
    let mut files: Vec<_> = std::fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "gauss"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            let text = std::fs::read_to_string(&p).unwrap();
            let d = parse_diagram(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
            (name, d)
        })
        .collect()
}

pub fn corpus_diagram(name: &str) -> Diagram {
    let text = std::fs::read_to_string(corpus_dir().join(format!("{name}.gauss"))).unwrap();
    parse_diagram(&text).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sign(rng: &mut ChaCha8Rng) -> Sign {
    if rng.gen() {
        Sign::Positive
    } else {
        Sign::Negative
    }
}

/// A uniformly shuffled signed Gauss code with `n` crossings on
/// `components` nonempty components (so `components <= 2n`).
pub fn random_code(rng: &mut ChaCha8Rng, n: usize, components: usize) -> GaussCode {
    let mut visits = Vec::with_capacity(2 * n);
    for id in 1..=n as u32 {
        let s = sign(rng);
        let first = if rng.gen() {
            Passage::Over
        } else {
            Passage::Under
        };
        visits.push(GaussEntry::new(id, first, s));
        visits.push(GaussEntry::new(id, first.flip(), s));
    }
    visits.shuffle(rng);
    let mut cuts: Vec<usize> = (1..visits.len()).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(components - 1).collect();
    cuts.sort_unstable();
    let mut comps = Vec::new();
    let mut start = 0;
    for c in cuts.into_iter().chain([visits.len()]) {
        comps.push(visits[start..c].to_vec());
        start = c;
    }
    GaussCode::new(comps).unwrap()
}

pub fn random_diagram(rng: &mut ChaCha8Rng, max_n: usize) -> Diagram {
    let n = rng.gen_range(1..=max_n);
    let components = if rng.gen_bool(0.75) {
        1
    } else {
        rng.gen_range(2..=3.min(2 * n))
    };
    atomcert::build_diagram(random_code(rng, n, components)).unwrap()
}

/// The same code read from another starting visit with crossings renamed.
pub fn reencode(d: &Diagram, rng: &mut ChaCha8Rng) -> Diagram {
    let ids = d.code().crossing_ids();
    let mut fresh: Vec<u32> = (1..=3 * ids.len() as u32 + 3).collect();
    fresh.shuffle(rng);
    let rename = |id: u32| fresh[ids.iter().position(|&x| x == id).unwrap()];
    let comps = d
        .code()
        .components()
        .iter()
        .map(|c| {
            let mut c: Vec<GaussEntry> = c
                .iter()
                .map(|e| GaussEntry::new(rename(e.crossing), e.passage, e.sign))
                .collect();
            if !c.is_empty() {
                let k = rng.gen_range(0..c.len());
                c.rotate_left(k);
            }
            c
        })
        .collect();
    atomcert::build_diagram(GaussCode::new(comps).unwrap()).unwrap()
}
