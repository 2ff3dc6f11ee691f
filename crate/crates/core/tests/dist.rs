use hyperflow::prob::rat;
use hyperflow::{Dist, Error, Rat};
use num_traits::{One, Zero};

fn u(n: i64) -> Dist<i64> {
    Dist::uniform(0..n).unwrap()
}

#[test]
fn points_and_uniforms() {
    assert_eq!(Dist::point(true).get(&true), Rat::one());
    assert_eq!(Dist::point(3).len(), 1);
    assert_eq!(Dist::point(Dist::point(true)).avg(), Dist::point(true));
    let p = Dist::uniform(["p1", "p2", "p3"]).unwrap();
    assert!(p.iter().all(|(_, q)| *q == rat(1, 3)));
    assert_eq!(Dist::uniform([true]).unwrap(), Dist::point(true));
    assert!(u(4).iter().all(|(_, q)| *q == rat(1, 4)));
    assert_eq!(Dist::<i64>::uniform([]), Err(Error::EmptyUniform));
    // the listing is a set: duplicates do not add weight
    assert_eq!(Dist::uniform([1, 1, 2]).unwrap().get(&1), rat(1, 2));
}

#[test]
fn map_by_enumeration() {
    let half = Dist::from_pairs(vec![(7, rat(1, 2))]).unwrap();
    assert_eq!(half.map(|_| 'k'), Dist::from_pairs(vec![('k', rat(1, 2))]).unwrap());
    assert_eq!(u(4).map(|x| *x), u(4));
    // x div 2 over 0..3: count preimages independently
    let got = u(4).map(|x| x / 2);
    for k in 0..2 {
        let pre = (0..4).filter(|x| x / 2 == k).count() as i64;
        assert_eq!(got.get(&k), rat(pre, 4));
    }
}

#[test]
fn averages() {
    let d1 = Dist::from_pairs(vec![(true, rat(1, 3)), (false, rat(2, 3))]).unwrap();
    let d2 = Dist::uniform([true, false]).unwrap();
    let dd = Dist::from_pairs(vec![(d1, rat(3, 7)), (d2, rat(4, 7))]).unwrap();
    assert_eq!(dd.avg(), Dist::from_pairs(vec![(true, rat(3, 7)), (false, rat(4, 7))]).unwrap());
    assert_eq!(Dist::point(u(3)).avg(), u(3));
    let pts = Dist::from_pairs(vec![(Dist::point('a'), rat(1, 2)), (Dist::point('b'), rat(1, 2))]).unwrap();
    assert_eq!(pts.avg(), Dist::uniform(['a', 'b']).unwrap());
}

#[test]
fn expectations() {
    assert_eq!(u(4).expected(|x| Rat::from_integer((*x).into())), rat(3, 2));
    let part = Dist::from_pairs(vec![(0, rat(1, 3)), (1, rat(1, 6))]).unwrap();
    assert_eq!(part.expected(|_| Rat::one()), part.weight());
    let coin = Dist::uniform([false, true]).unwrap();
    let pair = coin.product(&coin);
    assert_eq!(pair.prob_of(|(x, y)| *x || *y), rat(3, 4));
}

#[test]
fn comprehensions() {
    let coin = Dist::uniform([false, true]).unwrap();
    let pair = coin.product(&coin);
    let both = pair
        .comprehend(|(x, y)| if *x || *y { Rat::one() } else { Rat::zero() }, |(x, y)| *x && *y)
        .unwrap();
    assert_eq!(both, Dist::from_pairs(vec![(true, rat(1, 3)), (false, rat(2, 3))]).unwrap());
    assert_eq!(u(4).comprehend(|_| Rat::one(), |x| *x).unwrap(), u(4));
    let upper = u(4).condition(|x| if *x >= 2 { Rat::one() } else { Rat::zero() }).unwrap();
    assert_eq!(upper, Dist::uniform([2, 3]).unwrap());
    assert_eq!(u(4).condition(|_| Rat::zero()), Err(Error::ZeroDenominator));
}

#[test]
fn canonical_form_and_validation() {
    let d = Dist::from_pairs(vec![(1, rat(1, 2)), (2, Rat::zero()), (1, rat(1, 4))]).unwrap();
    assert_eq!(d.len(), 1);
    assert_eq!(d.get(&1), rat(3, 4));
    assert!(Dist::from_pairs(vec![(1, rat(-1, 2))]).is_err());
    assert!(Dist::from_pairs(vec![(1, rat(3, 4)), (2, rat(1, 2))]).is_err());
    let a = Dist::from_pairs(vec![(1, rat(1, 4))]).unwrap();
    let b = Dist::from_pairs(vec![(1, rat(1, 2)), (2, rat(1, 4))]).unwrap();
    assert!(a.le(&b) && !b.le(&a));
    assert!(a.sum(&b).is_ok());
    assert!(b.sum(&b).is_err());
    assert_eq!(format!("{}", Dist::point(3)), "{{3 @ 1/1}}");
}
