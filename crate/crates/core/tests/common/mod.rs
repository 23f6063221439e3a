#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use dgtilt::complexes::Complex;
use dgtilt::linalg::{GradedMap, GradedSpace};
use dgtilt::scalar::Field;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixtures_with(ext: &str) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(fixture(""))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == ext))
        .collect();
    v.sort();
    v
}

/// A complex over F2 as raw bit matrices: `dims[k]` in degree `k` and
/// `d[k]: degree k → k+1` with `d[k][row][col]`.
#[derive(Debug, Clone)]
pub struct BitComplex {
    pub dims: Vec<usize>,
    pub d: Vec<Vec<Vec<u8>>>,
}

fn mul(a: &[Vec<u8>], b: &[Vec<u8>], inner: usize, cols: usize) -> Vec<Vec<u8>> {
    a.iter().map(|row| (0..cols).map(|j| (0..inner).fold(0, |acc, k| acc ^ (row[k] & b[k][j]))).collect()).collect()
}

/// Random complex with total dimension at most 8, built degree by degree by
/// rejection sampling until `d d = 0`.
pub fn random_bit_complex(rng: &mut ChaCha8Rng) -> BitComplex {
    let len: usize = rng.gen_range(1..=4);
    let mut dims = vec![];
    let mut left = 8usize;
    for _ in 0..len {
        let n = rng.gen_range(0..=left.min(4));
        dims.push(n);
        left -= n;
    }
    let mut d: Vec<Vec<Vec<u8>>> = vec![];
    for k in 0..len.saturating_sub(1) {
        let (src, tgt) = (dims[k], dims[k + 1]);
        let mut m = vec![vec![0u8; src]; tgt];
        for _ in 0..64 {
            let cand: Vec<Vec<u8>> = (0..tgt).map(|_| (0..src).map(|_| rng.gen_range(0..2)).collect()).collect();
            let ok = k == 0 || mul(&cand, &d[k - 1], src, dims[k - 1]).iter().flatten().all(|&x| x == 0);
            if ok {
                m = cand;
                break;
            }
        }
        d.push(m);
    }
    BitComplex { dims, d }
}

pub fn to_complex(b: &BitComplex) -> Complex {
    let f = Field::prime(2).unwrap();
    let mut basis = vec![];
    for (k, &n) in b.dims.iter().enumerate() {
        for i in 0..n {
            basis.push((format!("v{k}_{i}"), k as i32));
        }
    }
    let space = Arc::new(GradedSpace::new(f, basis).unwrap());
    let d = GradedMap::from_images(space.clone(), space.clone(), 1, |j| {
        let k = space.degree(j) as usize;
        let col = space.label(j).split('_').nth(1).unwrap().parse::<usize>().unwrap();
        if k + 1 >= b.dims.len() {
            return vec![];
        }
        (0..b.dims[k + 1])
            .filter(|&r| b.d[k][r][col] == 1)
            .map(|r| (space.index_of(&format!("v{}_{r}", k + 1)).unwrap(), f.one()))
            .collect()
    })
    .unwrap();
    Complex::new(d).unwrap()
}

fn apply(m: &[Vec<u8>], v: usize, src: usize) -> usize {
    let mut out = 0;
    for (r, row) in m.iter().enumerate() {
        let bit = (0..src).fold(0, |acc, c| acc ^ (row[c] & ((v >> c) as u8 & 1)));
        out |= (bit as usize) << r;
    }
    out
}

/// Kernel dimension, image dimension (of the incoming map) and homology
/// dimension per degree, by enumerating every vector.
pub fn brute_force(b: &BitComplex) -> Vec<(usize, usize, usize)> {
    let log2 = |n: usize| n.trailing_zeros() as usize;
    (0..b.dims.len())
        .map(|k| {
            let n = b.dims[k];
            let ker = if k + 1 < b.dims.len() { (0..1usize << n).filter(|&v| apply(&b.d[k], v, n) == 0).count() } else { 1 << n };
            let img = if k > 0 {
                let src = b.dims[k - 1];
                let set: std::collections::BTreeSet<usize> = (0..1usize << src).map(|v| apply(&b.d[k - 1], v, src)).collect();
                set.len()
            } else {
                1
            };
            (log2(ker), log2(img), log2(ker) - log2(img))
        })
        .collect()
}

/// Library kernel/image/homology dimensions in the same layout.
pub fn library_dims(c: &Complex, len: usize) -> Vec<(usize, usize, usize)> {
    let (ker, img) = dgtilt::linalg::kernel_image(c.differential());
    let h: BTreeMap<i32, usize> = dgtilt::complexes::homology(c).dims();
    (0..len as i32)
        .map(|n| (ker.dim_in(n), img.dim_in(n), h.get(&n).copied().unwrap_or(0)))
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
