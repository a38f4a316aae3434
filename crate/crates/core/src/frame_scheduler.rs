//! TDD frame layout and TSF-DMA user allocation.
//!
//! Each 5 ms half frame splits into a downlink interval (DI), a guard
//! interval (GI) and an uplink interval (UI). Times are integer nanoseconds
//! so frame boundaries never drift.
//!
//! Users are separated in space (one DCB per group), then in time
//! (subframes, one per half frame) and frequency (blocks of subcarriers)
//! inside a beam. Beam 0 is always the FDB and never carries users.

use std::collections::BTreeMap;
use std::fmt;

use crate::array_geometry::Direction;
use crate::scanning::{dcb_blocks, BeamWidths};
use crate::units::SPEED_OF_LIGHT;
use crate::{Error, Result, Scalar};

pub const HALF_FRAME_NS: u64 = 5_000_000;
pub const FRAME_NS: u64 = 2 * HALF_FRAME_NS;
pub const SUBCARRIERS_PER_BLOCK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameConfig {
    t_d_ns: u64,
    t_g_ns: u64,
    t_u_ns: u64,
}

impl FrameConfig {
    pub fn new(t_d_ns: u64, t_g_ns: u64, t_u_ns: u64) -> Result<Self> {
        let sum = t_d_ns.checked_add(t_g_ns).and_then(|s| s.checked_add(t_u_ns));
        if sum != Some(HALF_FRAME_NS) {
            return Err(Error::domain(format!(
                "DI + GI + UI must be exactly 5 ms, got {t_d_ns} + {t_g_ns} + {t_u_ns} ns"
            )));
        }
        Ok(Self { t_d_ns, t_g_ns, t_u_ns })
    }

    /// Durations in milliseconds, rounded to whole nanoseconds.
    pub fn from_ms(t_d: f64, t_g: f64, t_u: f64) -> Result<Self> {
        let ns = |ms: f64, name: &str| -> Result<u64> {
            if !(ms >= 0.0 && ms.is_finite()) {
                return Err(Error::domain(format!("{name} duration must be >= 0 ms, got {ms}")));
            }
            Ok((ms * 1e6).round() as u64)
        };
        Self::new(ns(t_d, "DI")?, ns(t_g, "GI")?, ns(t_u, "UI")?)
    }

    pub fn t_d_ns(&self) -> u64 {
        self.t_d_ns
    }
    pub fn t_g_ns(&self) -> u64 {
        self.t_g_ns
    }
    pub fn t_u_ns(&self) -> u64 {
        self.t_u_ns
    }

    /// True when an echo from `r_max_m` returns before the UI starts.
    pub fn guard_covers<T: Scalar>(&self, r_max_m: T) -> bool {
        let round_trip_s = 2.0 * r_max_m.to_f64_lossy() / SPEED_OF_LIGHT;
        self.t_g_ns as f64 * 1e-9 >= round_trip_s
    }
}

impl Default for FrameConfig {
    /// 3.5 ms DI, 0.5 ms GI, 1.0 ms UI.
    fn default() -> Self {
        Self { t_d_ns: 3_500_000, t_g_ns: 500_000, t_u_ns: 1_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntervalKind {
    Downlink,
    Guard,
    Uplink,
}

impl fmt::Display for IntervalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Downlink => "DI",
            Self::Guard => "GI",
            Self::Uplink => "UI",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArrayRole {
    TransmitDownlinkIsac,
    ReceiveEcho,
    ReceiveUplink,
    Idle,
}

impl fmt::Display for ArrayRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::TransmitDownlinkIsac => "transmit downlink ISAC",
            Self::ReceiveEcho => "receive echo",
            Self::ReceiveUplink => "receive uplink",
            Self::Idle => "idle",
        })
    }
}

/// One interval of the timeline. `sbsa1` transmits, `sbsa2` only receives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interval {
    pub kind: IntervalKind,
    pub start_ns: u64,
    pub end_ns: u64,
    pub sbsa1: ArrayRole,
    pub sbsa2: ArrayRole,
}

impl Interval {
    pub fn duration_ns(&self) -> u64 {
        self.end_ns - self.start_ns
    }
}

fn roles(kind: IntervalKind) -> (ArrayRole, ArrayRole) {
    match kind {
        IntervalKind::Downlink => (ArrayRole::TransmitDownlinkIsac, ArrayRole::ReceiveEcho),
        IntervalKind::Guard => (ArrayRole::Idle, ArrayRole::ReceiveEcho),
        IntervalKind::Uplink => (ArrayRole::ReceiveUplink, ArrayRole::ReceiveUplink),
    }
}

/// Six intervals of frame `k`, starting at `k · 10 ms`. Zero-length
/// intervals are kept so the layout is always DI, GI, UI twice.
pub fn frame_intervals(cfg: &FrameConfig, k: u64) -> Vec<Interval> {
    let mut t = k * FRAME_NS;
    let mut out = Vec::with_capacity(6);
    for _ in 0..2 {
        for (kind, len) in [
            (IntervalKind::Downlink, cfg.t_d_ns),
            (IntervalKind::Guard, cfg.t_g_ns),
            (IntervalKind::Uplink, cfg.t_u_ns),
        ] {
            let (sbsa1, sbsa2) = roles(kind);
            out.push(Interval { kind, start_ns: t, end_ns: t + len, sbsa1, sbsa2 });
            t += len;
        }
    }
    out
}

pub fn build_frame(cfg: &FrameConfig) -> Vec<Interval> {
    frame_intervals(cfg, 0)
}

/// Beam index: 0 is the FDB, `1..=n` the DCBs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BeamId(pub usize);

impl BeamId {
    pub const FDB: BeamId = BeamId(0);
}

pub type UserId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UserRequest {
    pub user: UserId,
    pub beam: BeamId,
    /// Requested (subframe, block) cells.
    pub demand: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment {
    pub user: UserId,
    pub beam: BeamId,
    pub subframe: usize,
    pub block: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResourceGrid {
    dcb_count: usize,
    subframes: usize,
    blocks: usize,
    assignments: Vec<Assignment>,
}

impl ResourceGrid {
    pub fn new(dcb_count: usize, subframes: usize, blocks: usize) -> Result<Self> {
        if subframes == 0 || blocks == 0 {
            return Err(Error::domain("resource grid needs at least one subframe and one block"));
        }
        Ok(Self { dcb_count, subframes, blocks, assignments: Vec::new() })
    }

    /// `subcarriers / 64` blocks over `subframes` half frames.
    pub fn for_subcarriers(dcb_count: usize, subframes: usize, subcarriers: usize) -> Result<Self> {
        if subcarriers % SUBCARRIERS_PER_BLOCK != 0 {
            return Err(Error::domain(format!(
                "{subcarriers} subcarriers do not split into blocks of {SUBCARRIERS_PER_BLOCK}"
            )));
        }
        Self::new(dcb_count, subframes, subcarriers / SUBCARRIERS_PER_BLOCK)
    }

    pub fn dcb_count(&self) -> usize {
        self.dcb_count
    }
    pub fn subframes(&self) -> usize {
        self.subframes
    }
    pub fn blocks(&self) -> usize {
        self.blocks
    }
    pub fn assignments(&self) -> &[Assignment] {
        &self.assignments
    }
    /// Cells available to one beam.
    pub fn capacity_per_beam(&self) -> usize {
        self.subframes * self.blocks
    }

    fn in_bounds(&self, a: &Assignment) -> bool {
        a.beam.0 <= self.dcb_count && a.subframe < self.subframes && a.block < self.blocks
    }

    /// Records an assignment without checking for conflicts.
    pub fn assign_unchecked(&mut self, a: Assignment) -> Result<()> {
        if !self.in_bounds(&a) {
            return Err(Error::domain(format!(
                "cell (beam {}, subframe {}, block {}) is outside the grid",
                a.beam.0, a.subframe, a.block
            )));
        }
        self.assignments.push(a);
        Ok(())
    }

    pub fn granted(&self, user: UserId) -> usize {
        self.assignments.iter().filter(|a| a.user == user).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shortfall {
    pub user: UserId,
    pub beam: BeamId,
    pub demand: usize,
    pub granted: usize,
}

impl Shortfall {
    pub fn missing(&self) -> usize {
        self.demand - self.granted
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub user: UserId,
    pub beam: BeamId,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AllocationReport {
    pub shortfalls: Vec<Shortfall>,
    pub rejected: Vec<Rejection>,
}

impl AllocationReport {
    pub fn is_complete(&self) -> bool {
        self.shortfalls.is_empty() && self.rejected.is_empty()
    }
}

/// Greedy first-fit: requests in order, each taking the free cells of its
/// beam in subframe-major order.
pub fn allocate(grid: &mut ResourceGrid, requests: &[UserRequest]) -> AllocationReport {
    let mut used: BTreeMap<BeamId, Vec<bool>> = BTreeMap::new();
    for a in &grid.assignments {
        used.entry(a.beam).or_insert_with(|| vec![false; grid.capacity_per_beam()])[a.subframe * grid.blocks + a.block] =
            true;
    }
    let mut report = AllocationReport::default();
    for r in requests {
        let reject = |reason: &str| Rejection { user: r.user, beam: r.beam, reason: reason.to_string() };
        if r.beam == BeamId::FDB {
            report.rejected.push(reject("the free-detection beam carries no directed users"));
            continue;
        }
        if r.beam.0 > grid.dcb_count {
            report.rejected.push(reject("no such communication beam"));
            continue;
        }
        if r.demand == 0 {
            report.rejected.push(reject("demand must be at least one cell"));
            continue;
        }
        let cells = used.entry(r.beam).or_insert_with(|| vec![false; grid.capacity_per_beam()]);
        let mut granted = 0;
        for (i, busy) in cells.iter_mut().enumerate() {
            if granted == r.demand {
                break;
            }
            if !*busy {
                *busy = true;
                granted += 1;
                grid.assignments.push(Assignment {
                    user: r.user,
                    beam: r.beam,
                    subframe: i / grid.blocks,
                    block: i % grid.blocks,
                });
            }
        }
        if granted < r.demand {
            report.shortfalls.push(Shortfall { user: r.user, beam: r.beam, demand: r.demand, granted });
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation<T> {
    /// Several users on one (beam, subframe, block) cell.
    DoubleBooked { beam: BeamId, subframe: usize, block: usize, users: Vec<UserId> },
    /// A user scheduled on the free-detection beam.
    UserOnFdb { user: UserId, subframe: usize, block: usize },
    /// A scan dwell pointing the FDB at an active DCB.
    FdbOnDcb { dwell: Direction<T>, dcb: Direction<T> },
}

impl<T: Scalar> fmt::Display for Violation<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DoubleBooked { beam, subframe, block, users } => write!(
                f,
                "double booking on beam {} subframe {subframe} block {block}: users {users:?}",
                beam.0
            ),
            Self::UserOnFdb { user, subframe, block } => {
                write!(f, "user {user} scheduled on the FDB at subframe {subframe} block {block}")
            }
            Self::FdbOnDcb { dwell, dcb } => write!(f, "FDB dwell at {dwell} overlaps DCB at {dcb}"),
        }
    }
}

/// Every interference violation in a schedule; empty means clean.
pub fn check_interference_free<T: Scalar>(
    grid: &ResourceGrid,
    dwells: &[Direction<T>],
    dcb_dirs: &[Direction<T>],
    widths: &BeamWidths<T>,
) -> Vec<Violation<T>> {
    let mut out = Vec::new();
    let mut cells: BTreeMap<(BeamId, usize, usize), Vec<UserId>> = BTreeMap::new();
    for a in &grid.assignments {
        cells.entry((a.beam, a.subframe, a.block)).or_default().push(a.user);
        if a.beam == BeamId::FDB {
            out.push(Violation::UserOnFdb { user: a.user, subframe: a.subframe, block: a.block });
        }
    }
    for ((beam, subframe, block), users) in cells {
        if users.len() > 1 {
            out.push(Violation::DoubleBooked { beam, subframe, block, users });
        }
    }
    for dwell in dwells {
        for dcb in dcb_dirs {
            if dcb_blocks(dwell, std::slice::from_ref(dcb), widths) {
                out.push(Violation::FdbOnDcb { dwell: *dwell, dcb: *dcb });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scanning::{scanning_period, SceneGeometry};
    use proptest::prelude::*;

    #[test]
    fn config_sum_is_exact() {
        assert!(FrameConfig::new(3_500_000, 500_000, 1_000_000).is_ok());
        assert!(FrameConfig::new(3_500_000, 500_000, 999_999).is_err());
        assert!(FrameConfig::new(u64::MAX, 1, 0).is_err());
        assert!(FrameConfig::from_ms(3.5, 0.5, 1.0).is_ok());
        assert!(FrameConfig::from_ms(3.5, -0.5, 2.0).is_err());
        assert_eq!(FrameConfig::from_ms(3.5, 0.5, 1.0).unwrap(), FrameConfig::default());
    }

    #[test]
    fn default_frame_layout() {
        let f = build_frame(&FrameConfig::default());
        assert_eq!(f.len(), 6);
        let kinds: Vec<_> = f.iter().map(|i| i.kind).collect();
        use IntervalKind::*;
        assert_eq!(kinds, [Downlink, Guard, Uplink, Downlink, Guard, Uplink]);
        assert_eq!(f[5].end_ns, FRAME_NS);
        assert_eq!(f[3].start_ns, HALF_FRAME_NS);
        for w in f.windows(2) {
            assert_eq!(w[0].end_ns, w[1].start_ns);
        }
        assert_eq!((f[0].sbsa1, f[0].sbsa2), (ArrayRole::TransmitDownlinkIsac, ArrayRole::ReceiveEcho));
        assert_eq!((f[1].sbsa1, f[1].sbsa2), (ArrayRole::Idle, ArrayRole::ReceiveEcho));
        assert_eq!((f[2].sbsa1, f[2].sbsa2), (ArrayRole::ReceiveUplink, ArrayRole::ReceiveUplink));
    }

    #[test]
    fn zero_guard_abuts() {
        let f = build_frame(&FrameConfig::new(4_000_000, 0, 1_000_000).unwrap());
        assert_eq!(f.len(), 6);
        assert_eq!(f[1].duration_ns(), 0);
        assert_eq!(f[0].end_ns, f[2].start_ns);
    }

    #[test]
    fn boundaries_do_not_drift() {
        let cfg = FrameConfig::default();
        let k = 1_000_000;
        let f = frame_intervals(&cfg, k);
        assert_eq!(f[0].start_ns, k * 10_000_000);
        assert_eq!(f[1].start_ns, k * 10_000_000 + 3_500_000);
        assert_eq!(f[5].end_ns, (k + 1) * 10_000_000);
    }

    #[test]
    fn guard_check() {
        // 2 · 532 m / c ≈ 3.549 µs
        let cfg = FrameConfig::default();
        assert!(cfg.guard_covers(532.0));
        let short = FrameConfig::new(4_996_000, 3_000, 1_000).unwrap();
        assert!(!short.guard_covers(532.0));
        let exact = FrameConfig::new(4_995_451, 3_549, 1_000).unwrap();
        assert!(exact.guard_covers(531.9));
    }

    fn grid() -> ResourceGrid {
        ResourceGrid::for_subcarriers(4, 20, 1024).unwrap()
    }

    #[test]
    fn grid_shape() {
        let g = grid();
        assert_eq!((g.subframes(), g.blocks(), g.capacity_per_beam()), (20, 16, 320));
        assert!(ResourceGrid::for_subcarriers(4, 20, 1000).is_err());
        assert!(ResourceGrid::new(4, 0, 16).is_err());
    }

    #[test]
    fn space_separation_reuses_cells() {
        let mut g = grid();
        let r = allocate(&mut g, &[UserRequest { user: 1, beam: BeamId(1), demand: 5 }, UserRequest { user: 2, beam: BeamId(2), demand: 5 }]);
        assert!(r.is_complete());
        let cells = |u| -> Vec<_> { g.assignments().iter().filter(|a| a.user == u).map(|a| (a.subframe, a.block)).collect() };
        assert_eq!(cells(1), cells(2));
    }

    #[test]
    fn same_beam_users_are_disjoint() {
        let mut g = grid();
        allocate(&mut g, &[UserRequest { user: 1, beam: BeamId(3), demand: 40 }, UserRequest { user: 2, beam: BeamId(3), demand: 40 }]);
        let a: std::collections::HashSet<_> =
            g.assignments().iter().filter(|a| a.user == 1).map(|a| (a.subframe, a.block)).collect();
        assert!(g.assignments().iter().filter(|x| x.user == 2).all(|x| !a.contains(&(x.subframe, x.block))));
        assert!(check_interference_free::<f64>(&g, &[], &[], &BeamWidths::new(2.0, 3.0).unwrap()).is_empty());
    }

    #[test]
    fn shortfall_is_exact() {
        let mut g = grid();
        let r = allocate(&mut g, &[UserRequest { user: 1, beam: BeamId(1), demand: 300 }, UserRequest { user: 2, beam: BeamId(1), demand: 50 }]);
        assert_eq!(r.shortfalls, vec![Shortfall { user: 2, beam: BeamId(1), demand: 50, granted: 20 }]);
        assert_eq!(r.shortfalls[0].missing(), 30);
        assert_eq!(g.granted(1), 300);
    }

    #[test]
    fn bad_requests_rejected() {
        let mut g = grid();
        let r = allocate(
            &mut g,
            &[
                UserRequest { user: 1, beam: BeamId::FDB, demand: 1 },
                UserRequest { user: 2, beam: BeamId(5), demand: 1 },
                UserRequest { user: 3, beam: BeamId(1), demand: 0 },
            ],
        );
        assert_eq!(r.rejected.len(), 3);
        assert!(g.assignments().is_empty());
    }

    #[test]
    fn manufactured_double_booking() {
        let mut g = grid();
        let w = BeamWidths::new(2.0, 3.0).unwrap();
        assert!(check_interference_free::<f64>(&g, &[], &[], &w).is_empty());
        g.assign_unchecked(Assignment { user: 1, beam: BeamId(2), subframe: 3, block: 7 }).unwrap();
        g.assign_unchecked(Assignment { user: 9, beam: BeamId(2), subframe: 3, block: 7 }).unwrap();
        g.assign_unchecked(Assignment { user: 4, beam: BeamId::FDB, subframe: 0, block: 0 }).unwrap();
        assert!(g.assign_unchecked(Assignment { user: 4, beam: BeamId(2), subframe: 20, block: 0 }).is_err());
        let v = check_interference_free::<f64>(&g, &[], &[], &w);
        assert!(v.contains(&Violation::DoubleBooked { beam: BeamId(2), subframe: 3, block: 7, users: vec![1, 9] }));
        assert!(v.contains(&Violation::UserOnFdb { user: 4, subframe: 0, block: 0 }));
        assert_eq!(v.len(), 2);
        // allocation respects cells already taken by hand
        let r = allocate(&mut g, &[UserRequest { user: 5, beam: BeamId(2), demand: 320 }]);
        assert_eq!(r.shortfalls[0].granted, 319);
    }

    #[test]
    fn scan_with_avoidance_is_clean() {
        let w = BeamWidths::new(2.0, 3.0).unwrap();
        let dcbs: Vec<_> = [(-60.0, 60.0), (60.0, 70.0), (90.0, 80.0)]
            .iter()
            .map(|(p, t)| Direction::new(*p, *t).unwrap())
            .collect();
        let scan = scanning_period(&SceneGeometry::with_range(532.0).unwrap(), &w, &dcbs).unwrap();
        let g = grid();
        assert!(check_interference_free(&g, &scan.dwells().unwrap(), &dcbs, &w).is_empty());
        let free = scanning_period(&SceneGeometry::with_range(532.0).unwrap(), &w, &[]).unwrap();
        let v = check_interference_free(&g, &free.dwells().unwrap(), &dcbs, &w);
        assert!(!v.is_empty());
        assert!(v.iter().all(|x| matches!(x, Violation::FdbOnDcb { .. })));
    }

    proptest! {
        #[test]
        fn allocation_sound_and_conserving(
            reqs in proptest::collection::vec((1usize..6, 1usize..120), 0..12)
        ) {
            let mut g = grid();
            let requests: Vec<_> = reqs
                .iter()
                .enumerate()
                .map(|(i, (b, d))| UserRequest { user: i as UserId, beam: BeamId(*b), demand: *d })
                .collect();
            let report = allocate(&mut g, &requests);
            let w = BeamWidths::new(2.0, 3.0).unwrap();
            prop_assert!(check_interference_free::<f64>(&g, &[], &[], &w).is_empty());
            for r in &requests {
                let granted = g.granted(r.user);
                prop_assert!(granted <= r.demand);
                let short = report.shortfalls.iter().find(|s| s.user == r.user);
                let rejected = report.rejected.iter().any(|s| s.user == r.user);
                match (short, rejected) {
                    (Some(s), false) => prop_assert_eq!(s.granted, granted),
                    (None, true) => prop_assert_eq!(granted, 0),
                    (None, false) => prop_assert_eq!(granted, r.demand),
                    _ => prop_assert!(false),
                }
            }
        }
    }
}
