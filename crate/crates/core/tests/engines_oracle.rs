mod common;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rangebench::geom::enclosing_sphere;
use rangebench::{BruteForceStore, KdConfig, KdTree, OctConfig, Octree, RTree, RTreeConfig, SpatialIndex, Sphere};

#[test]
fn ten_thousand_points_hundred_boxes() {
    let pts = uniform_points(10_000, 1);
    let queries = mixed_queries(100, 2);
    let engines: Vec<Box<dyn SpatialIndex<_>>> = vec![
        Box::new(BruteForceStore::build(&pts).unwrap()),
        Box::new(KdTree::build(&pts, KdConfig::new(20))),
        Box::new(KdTree::build(&pts, KdConfig::new(1))),
        Box::new(RTree::build(&pts, RTreeConfig::new(20).unwrap())),
        Box::new(RTree::build(&pts, RTreeConfig::new(2).unwrap())),
        Box::new(Octree::build(&pts, OctConfig::new(20))),
    ];
    let mut nonempty = 0;
    for q in &queries {
        let want = naive_points(&pts, q);
        nonempty += usize::from(!want.is_empty());
        for e in &engines {
            assert_eq!(sorted(e.query_box(q)), want, "{} on {q:?}", e.engine_name());
        }
    }
    assert!(nonempty > 50);
}

#[test]
fn ten_thousand_points_hundred_spheres() {
    let pts = uniform_points(10_000, 3);
    let kd = KdTree::build(&pts, KdConfig::new(20));
    let oct = Octree::build(&pts, OctConfig::new(20));
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..100 {
        let c = rangebench::Point3::new(rng.gen(), rng.gen(), rng.gen());
        let s = Sphere::new(c, [0.0, 0.02, 0.1, 0.3, 0.9][i % 5] * rng.gen::<f64>());
        let want = naive_ball(&pts, &s);
        assert_eq!(sorted(kd.query_sphere(&s)), want);
        assert_eq!(sorted(oct.query_sphere(&s)), want);
    }
    // Radius zero on an existing point finds it.
    let s = Sphere::new(pts[17].point, 0.0);
    assert_eq!(sorted(kd.query_sphere(&s)), vec![17]);
    assert_eq!(sorted(oct.query_sphere(&s)), vec![17]);
    let all = enclosing_sphere(&kd.root().unwrap().bounds);
    assert_eq!(kd.query_sphere(&all).len(), pts.len());
}

#[test]
fn boxes_against_reference() {
    let boxes = random_boxes(5000, 0.05, 5);
    let queries = mixed_queries(100, 6);
    let bf = BruteForceStore::build(&boxes).unwrap();
    let rt = RTree::build(&boxes, RTreeConfig::new(16).unwrap());
    for q in &queries {
        let want = naive_boxes(&boxes, q);
        assert_eq!(sorted(bf.query(q)), want);
        assert_eq!(sorted(rt.query_box(q)), want);
    }
}

#[test]
fn adapter_candidates_cover_result() {
    let pts = uniform_points(20_000, 7);
    let oct = Octree::build(&pts, OctConfig::new(20));
    for q in mixed_queries(50, 8) {
        let cand = sorted(oct.sphere_candidates(&q));
        let res = sorted(oct.query_box_via_sphere(&q));
        assert!(res.iter().all(|id| cand.binary_search(id).is_ok()));
    }
}

#[test]
fn memory_accounting_consistency() {
    let pts = uniform_points(30_000, 9);
    let payload = pts.len() * 24;
    let engines: Vec<Box<dyn SpatialIndex<_>>> = vec![
        Box::new(BruteForceStore::build(&pts).unwrap()),
        Box::new(KdTree::build(&pts, KdConfig::new(20))),
        Box::new(RTree::build(&pts, RTreeConfig::new(20).unwrap())),
        Box::new(Octree::build(&pts, OctConfig::new(20))),
    ];
    for e in &engines {
        let m = e.memory();
        assert!(m.live_bytes >= payload, "{} {m:?}", e.engine_name());
        assert!(m.peak_bytes >= m.live_bytes, "{} {m:?}", e.engine_name());
    }
}

fn point_strategy() -> impl Strategy<Value = Vec<[f64; 3]>> {
    // A coarse lattice makes ties and duplicates common.
    prop::collection::vec(prop::array::uniform3((0..8i32).prop_map(|v| v as f64 / 4.0)), 0..120)
}

fn box_strategy() -> impl Strategy<Value = ([f64; 3], [f64; 3])> {
    (prop::array::uniform3(-0.5..2.0f64), prop::array::uniform3(0.0..1.5f64))
}

fn to_aabb((lo, ext): ([f64; 3], [f64; 3])) -> rangebench::Aabb {
    rangebench::Aabb::new(
        rangebench::Point3::from_array(lo),
        rangebench::Point3::new(lo[0] + ext[0], lo[1] + ext[1], lo[2] + ext[2]),
    )
}

proptest! {
    #[test]
    fn every_engine_matches_reference(coords in point_strategy(), qs in prop::collection::vec(box_strategy(), 1..10), leaf in 1usize..9) {
        let pts: Vec<_> = coords.iter().enumerate().map(|(i, c)| rangebench::PointRecord::new(rangebench::Point3::from_array(*c), i as u32)).collect();
        let kd = KdTree::build(&pts, KdConfig::new(leaf));
        let rt = RTree::build(&pts, RTreeConfig::new(leaf.max(2)).unwrap());
        let oct = Octree::build(&pts, OctConfig::new(leaf));
        prop_assert!(kd.structure_violations().is_empty());
        prop_assert!(rt.structure_violations().is_empty());
        prop_assert!(oct.structure_violations().is_empty());
        for q in qs.into_iter().map(to_aabb) {
            let want = naive_points(&pts, &q);
            prop_assert_eq!(&sorted(kd.query_box(&q)), &want);
            prop_assert_eq!(&sorted(rt.query_box(&q)), &want);
            prop_assert_eq!(&sorted(oct.query_box_via_sphere(&q)), &want);
        }
    }

    #[test]
    fn results_grow_with_the_query(coords in point_strategy(), q in box_strategy(), grow in prop::array::uniform6(0.0..0.5f64)) {
        let pts: Vec<_> = coords.iter().enumerate().map(|(i, c)| rangebench::PointRecord::new(rangebench::Point3::from_array(*c), i as u32)).collect();
        let inner = to_aabb(q);
        let outer = rangebench::Aabb::new(
            rangebench::Point3::new(inner.min.x - grow[0], inner.min.y - grow[1], inner.min.z - grow[2]),
            rangebench::Point3::new(inner.max.x + grow[3], inner.max.y + grow[4], inner.max.z + grow[5]),
        );
        let engines: Vec<Box<dyn SpatialIndex<_>>> = vec![
            Box::new(KdTree::build(&pts, KdConfig::new(3))),
            Box::new(RTree::build(&pts, RTreeConfig::new(3).unwrap())),
            Box::new(Octree::build(&pts, OctConfig::new(3))),
        ];
        for e in &engines {
            let small = sorted(e.query_box(&inner));
            let big = sorted(e.query_box(&outer));
            prop_assert!(small.iter().all(|id| big.binary_search(id).is_ok()));
        }
    }

    #[test]
    fn rtree_boxes_match_reference(raw in prop::collection::vec(box_strategy(), 0..80), qs in prop::collection::vec(box_strategy(), 1..8), m in 2usize..7) {
        let boxes: Vec<_> = raw.into_iter().enumerate().map(|(i, b)| rangebench::BoxRecord::new(to_aabb(b), i as u32)).collect();
        let rt = RTree::build(&boxes, RTreeConfig::new(m).unwrap());
        prop_assert!(rt.structure_violations().is_empty());
        for q in qs.into_iter().map(to_aabb) {
            prop_assert_eq!(sorted(rt.query_box(&q)), naive_boxes(&boxes, &q));
        }
    }
}
