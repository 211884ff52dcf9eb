//! Construction and access timings for the multirotor layouts.
//!
//! CSV schemas (header row, `,` separated, column order fixed):
//!
//! * build: `N,rotors,flavor,median_ns,p90_ns`
//! * access: `flavor,raw_ns,map_ns,ratio` (nanoseconds per read)

use std::hint::black_box;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::fixtures;
use crate::query;
use crate::variable::{Hierarchy, Selector};
use crate::varmap::{EagerLocator, EagerMap, Handle, LazyLocator, LazyMap, Locator};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid benchmark configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("flavors disagree: {0}")]
    Mismatch(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchConfig {
    pub horizons: Vec<usize>,
    pub rotors: Vec<usize>,
    pub repetitions: usize,
    pub warmup: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig { horizons: vec![30, 90, 390], rotors: vec![4, 8], repetitions: 11, warmup: 2 }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.horizons.is_empty() || self.rotors.is_empty() {
            return Err(BenchError::Config("horizon and rotor grids must be nonempty".into()));
        }
        if self.horizons.contains(&0) || self.rotors.contains(&0) {
            return Err(BenchError::Config("grid values must be positive".into()));
        }
        if self.repetitions < 3 {
            return Err(BenchError::Config(format!("need at least 3 repetitions, got {}", self.repetitions)));
        }
        Ok(())
    }

    /// The grid point with the most variables.
    pub fn largest(&self) -> (usize, usize) {
        (*self.horizons.iter().max().unwrap(), *self.rotors.iter().max().unwrap())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    Eager,
    Lazy,
}

impl Flavor {
    pub fn as_str(self) -> &'static str {
        match self {
            Flavor::Eager => "eager",
            Flavor::Lazy => "lazy",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuildRow {
    pub horizon: usize,
    pub rotors: usize,
    pub flavor: Flavor,
    pub median_ns: f64,
    pub p90_ns: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AccessRow {
    pub flavor: Flavor,
    pub raw_ns: f64,
    pub map_ns: f64,
}

impl AccessRow {
    pub fn ratio(&self) -> f64 {
        self.map_ns / self.raw_ns
    }
}

pub const BUILD_HEADER: &str = "N,rotors,flavor,median_ns,p90_ns";
pub const ACCESS_HEADER: &str = "flavor,raw_ns,map_ns,ratio";

pub fn build_csv(rows: &[BuildRow]) -> String {
    let mut s = format!("{BUILD_HEADER}\n");
    for r in rows {
        s += &format!("{},{},{},{:.0},{:.0}\n", r.horizon, r.rotors, r.flavor.as_str(), r.median_ns, r.p90_ns);
    }
    s
}

pub fn access_csv(rows: &[AccessRow]) -> String {
    let mut s = format!("{ACCESS_HEADER}\n");
    for r in rows {
        s += &format!("{},{:.3},{:.3},{:.3}\n", r.flavor.as_str(), r.raw_ns, r.map_ns, r.ratio());
    }
    s
}

/// Median and 90th percentile (nearest rank).
pub fn summarize(samples: &mut [f64]) -> (f64, f64) {
    samples.sort_by(f64::total_cmp);
    let n = samples.len();
    let median = if n % 2 == 1 { samples[n / 2] } else { 0.5 * (samples[n / 2 - 1] + samples[n / 2]) };
    let rank = ((0.9 * n as f64).ceil() as usize).clamp(1, n);
    (median, samples[rank - 1])
}

fn time_ns(f: impl FnOnce()) -> f64 {
    let t = Instant::now();
    f();
    t.elapsed().as_nanos() as f64
}

fn build_once(flavor: Flavor, horizon: usize, rotors: usize) -> f64 {
    time_ns(|| {
        let h = fixtures::multirotor(horizon, rotors).expect("multirotor hierarchy");
        match flavor {
            Flavor::Eager => {
                black_box(EagerMap::<f64>::new(&h));
            }
            Flavor::Lazy => {
                black_box(LazyMap::new(&h, vec![0.0; h.size()]).expect("sized buffer"));
            }
        }
    })
}

/// Times hierarchy construction plus map setup for every grid point and flavor.
pub fn bench_build(config: &BenchConfig) -> Result<Vec<BuildRow>, BenchError> {
    config.validate()?;
    let mut rows = Vec::new();
    for &horizon in &config.horizons {
        for &rotors in &config.rotors {
            for flavor in [Flavor::Eager, Flavor::Lazy] {
                for _ in 0..config.warmup {
                    build_once(flavor, horizon, rotors);
                }
                let mut samples: Vec<f64> =
                    (0..config.repetitions).map(|_| build_once(flavor, horizon, rotors)).collect();
                let (median_ns, p90_ns) = summarize(&mut samples);
                rows.push(BuildRow { horizon, rotors, flavor, median_ns, p90_ns });
            }
        }
    }
    Ok(rows)
}

/// A random leaf read: the selector to use and its copy indices.
struct Read {
    selector: usize,
    indices: [usize; 2],
    arity: usize,
}

struct AccessFixture {
    data: Vec<f64>,
    selectors: Vec<Selector>,
    reads: Vec<Read>,
    offsets: Vec<usize>,
    handles: Vec<Handle>,
    eager: EagerLocator,
    lazy: LazyLocator,
}

fn access_fixture(h: &Hierarchy, horizon: usize, rotors: usize, count: usize) -> AccessFixture {
    let leaves = ["position", "orientation", "linear_velocity", "angular_velocity"];
    let mut selectors: Vec<Selector> = leaves.iter().map(|l| h.selector(&["x", l]).unwrap()).collect();
    selectors.push(h.selector(&["u", "rotor_speed"]).unwrap());
    let eager = EagerLocator::new(h);
    let lazy = LazyLocator::new(h);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut reads = Vec::with_capacity(count);
    let mut offsets = Vec::with_capacity(count);
    let mut handles = Vec::with_capacity(count);
    for _ in 0..count {
        let s = rng.random_range(0..selectors.len());
        let read = if s < leaves.len() {
            Read { selector: s, indices: [rng.random_range(0..=horizon), 0], arity: 1 }
        } else {
            Read { selector: s, indices: [rng.random_range(0..horizon), rng.random_range(0..rotors)], arity: 2 }
        };
        let idx = &read.indices[..read.arity];
        let q =
            if s < leaves.len() { query!["x", idx[0], leaves[s]] } else { query!["u", idx[0], "rotor_speed", idx[1]] };
        offsets.push(h.resolve(&q).unwrap().offset());
        handles.push(eager.handle_at(&selectors[s], idx).unwrap());
        reads.push(read);
    }
    let data = (0..h.size()).map(|i| i as f64).collect();
    AccessFixture { data, selectors, reads, offsets, handles, eager, lazy }
}

fn read_raw(f: &AccessFixture) -> f64 {
    let mut s = 0.0;
    for &o in &f.offsets {
        s += black_box(&f.data)[o];
    }
    s
}

fn read_eager(f: &AccessFixture, map: &EagerMap<f64>) -> f64 {
    let mut s = 0.0;
    for &h in &f.handles {
        s += black_box(map).get_handle(h).as_slice()[0];
    }
    s
}

fn read_lazy(f: &AccessFixture) -> f64 {
    let mut s = 0.0;
    for r in &f.reads {
        let slot = f.lazy.locate_at(&f.selectors[r.selector], &r.indices[..r.arity]).unwrap();
        s += black_box(&f.data)[slot.offset];
    }
    s
}

/// Times random leaf reads through eager handles, lazy selectors and raw
/// offsets at the largest grid point. All three must read the same values.
pub fn bench_access(config: &BenchConfig, reads: usize) -> Result<Vec<AccessRow>, BenchError> {
    config.validate()?;
    if reads == 0 {
        return Err(BenchError::Config("need at least one read".into()));
    }
    let (horizon, rotors) = config.largest();
    let h = fixtures::multirotor(horizon, rotors).expect("multirotor hierarchy");
    let f = access_fixture(&h, horizon, rotors, reads);
    let map = EagerMap::with_locator(f.eager.clone(), f.data.clone()).expect("sized buffer");

    let expected = read_raw(&f);
    for (name, got) in [("eager", read_eager(&f, &map)), ("lazy", read_lazy(&f))] {
        if got != expected {
            return Err(BenchError::Mismatch(format!("{name} read sum {got}, raw {expected}")));
        }
    }

    // Flavors alternate within each repetition so drift hits them alike.
    let readers: [&dyn Fn() -> f64; 3] = [&|| read_raw(&f), &|| read_eager(&f, &map), &|| read_lazy(&f)];
    for _ in 0..config.warmup {
        readers.iter().for_each(|g| {
            black_box(g());
        });
    }
    let mut samples = [vec![], vec![], vec![]];
    for _ in 0..config.repetitions {
        for (g, out) in readers.iter().zip(samples.iter_mut()) {
            out.push(
                time_ns(|| {
                    black_box(g());
                }) / reads as f64,
            );
        }
    }
    let [raw_ns, eager_ns, lazy_ns] = samples.map(|mut v| summarize(&mut v).0);
    Ok(vec![
        AccessRow { flavor: Flavor::Eager, raw_ns, map_ns: eager_ns },
        AccessRow { flavor: Flavor::Lazy, raw_ns, map_ns: lazy_ns },
    ])
}
