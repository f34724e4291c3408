use genus0::forms::*;
use genus0::polygon::*;
use genus0::scalar::{Field, Rat};

fn main() {
    for n in 4..=7 {
        let poly = Polygon::standard(n);
        let nu = nu_form(&poly);
        for c in poly.all_chords() {
            let (p1, p2) = poly.split_pieces(c).unwrap();
            let nu_c = nu_form(&Polygon::standard(4));
            let pulled = pullback_trivialisation(&poly, c, &nu_c, &nu_form(&p1.poly), &nu_form(&p2.poly)).unwrap();
            let t = seeded_cell_point(n - 3, 99);
            let chart = Chart::simplicial(&t);
            let a = chart.evaluate_top(&pulled).unwrap();
            let b = chart.evaluate_top(&nu).unwrap();
            let ratio = a / b;
            let claimed = if ((p1.poly.len()-1)*(p2.poly.len()-1)) % 2 == 0 { 1 } else { -1 };
            println!("n={} c={} sizes=({},{}) ratio={} claimed={}", n, c, p1.poly.len(), p2.poly.len(), ratio, claimed);
            assert!(ratio.clone() * ratio.clone() == Rat::from_integer(1.into()), "not +-1!");
        }
    }
}
