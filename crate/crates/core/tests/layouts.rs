//! Fixture sizes against a recursive-sum oracle, and eager/lazy map agreement.

mod common;

use common::layout::{
    all_queries, check_agreement, check_tiling, clm_tree, fixtures, locomotion_tree, quadrotor_tree, total,
};
use strata::fixtures;
use strata::variable::{Hierarchy, Kind};

#[test]
fn fixture_sizes_match_recursive_sum() {
    assert_eq!(total(&locomotion_tree(30, 4)), 1123);
    assert_eq!(total(&clm_tree(10, 2, 4)), 1029);
    assert_eq!(total(&quadrotor_tree(30, 4)), 523);
    assert_eq!(fixtures::locomotion(30, 4).unwrap().size(), 1123);
    assert_eq!(fixtures::loco_manipulation(10, 2, 4).unwrap().size(), 1029);
    for n in [1, 7, 30] {
        for legs in [1, 2, 4, 6] {
            assert_eq!(fixtures::locomotion(n, legs).unwrap().size(), total(&locomotion_tree(n, legs)));
            assert_eq!(fixtures::loco_manipulation(n, 3, legs).unwrap().size(), total(&clm_tree(n, 3, legs)));
        }
        for rotors in [1, 4, 8] {
            assert_eq!(fixtures::multirotor(n, rotors).unwrap().size(), total(&quadrotor_tree(n, rotors)));
        }
    }
}

#[test]
fn eager_and_lazy_agree_on_every_query() {
    for h in fixtures() {
        check_agreement(&h).unwrap();
    }
}

#[test]
fn leaves_tile_the_buffer() {
    for h in fixtures() {
        check_tiling(&h).unwrap();
    }
}

#[test]
fn offsets_are_relative_to_the_queried_root() {
    for h in fixtures() {
        for (q, kind) in all_queries(&h) {
            if kind != Kind::Branch {
                continue;
            }
            let outer = h.resolve(&q).unwrap();
            let sub = outer.hierarchy();
            assert_eq!(sub.size(), outer.size());
            for (rest, _) in all_queries(sub).into_iter().step_by(7) {
                let inner = sub.resolve(&rest).unwrap();
                let joined = h.resolve(&q.join(&rest)).unwrap();
                assert_eq!(joined.offset(), outer.offset() + inner.offset(), "{q} + {rest}");
                assert_eq!(joined.size(), inner.size());
            }
        }
    }
}

#[test]
fn children_tile_their_parent() {
    fn check(h: &Hierarchy) {
        if h.is_leaf() {
            return;
        }
        let mut next = 0;
        for slot in h.children() {
            assert_eq!(slot.offset(), next, "{}", h.name());
            next += slot.count() * slot.hierarchy().size();
            check(slot.hierarchy());
        }
        assert_eq!(next, h.size());
    }
    fixtures().iter().for_each(check);
}
