use betamatch::dynamics::matching_index;
use betamatch::fields::get;
use betamatch::multinacci::{code_of_difference, Decoded};
use betamatch::paramsweep::{interior_rational, refine, sweep};
use betamatch::transitions::{build_graph, Node};
use num_rational::BigRational;

fn third() -> BigRational {
    BigRational::new(1.into(), 3.into())
}

#[test]
fn sweep_intervals_agree_with_pointwise_matching() {
    for name in ["golden", "silver", "x2-3x-2", "tribonacci"] {
        let f = get(name);
        let r = sweep(&f, 9).unwrap();
        for m in r.matched.iter().step_by(7) {
            let a = interior_rational(&m.lo, &m.hi, &third());
            let got = matching_index(&f, &a, 20).unwrap().matched_at();
            assert_eq!(got, Some(m.index), "{name} at {a}");
        }
    }
}

#[test]
fn refining_equals_sweeping_deeper() {
    let f = get("x2-5x+3");
    let shallow = sweep(&f, 5).unwrap();
    let refined = refine(&shallow, 3).unwrap();
    let direct = sweep(&f, 8).unwrap();
    let key = |r: &betamatch::paramsweep::SweepResult| {
        r.matched
            .iter()
            .map(|m| (m.lo.clone(), m.hi.clone(), m.index))
            .collect::<Vec<_>>()
    };
    assert_eq!(key(&refined), key(&direct));
    assert_eq!(refined.unresolved.len(), direct.unresolved.len());
}

#[test]
fn tetrabonacci_graph_nodes_decode() {
    let f = get("tetrabonacci");
    let g = build_graph(&sweep(&f, 10).unwrap());
    assert!(g.nodes.contains(&Node::Start) && g.nodes.contains(&Node::Matching));
    for d in g.difference_nodes() {
        assert!(matches!(code_of_difference(&f, d), Ok(Decoded::Code(_))), "{d}");
    }
    assert!(g.edge_law_holds());
}
