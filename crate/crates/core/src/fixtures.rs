//! Small hand-built networks used by tests, examples and the demo page.
//!
//! Every link in the edge lists below is `id,src,dst,cost,delay,srlgs`.

use crate::graph::{load_network, Network};

fn parse(text: &str) -> Network {
    load_network(text).expect("fixture parses")
}

/// Diamond `s->a->t` (delay 2, cost 2) and `s->b->t` (delay 4, cost 10).
pub fn g1() -> Network {
    parse(
        "0,s,a,1,1,\n\
         1,a,t,1,1,\n\
         2,s,b,5,2,\n\
         3,b,t,5,2,\n",
    )
}

/// Five nodes where the cheapest walk with delay exactly 8 repeats node D
/// (`A->D->C->D->E`, cost 7) while the cheapest elementary path is
/// `A->B->C->D->E` (cost 8).
pub fn g2() -> Network {
    parse(
        "0,A,B,2,2,\n\
         1,B,C,2,2,\n\
         2,A,D,2,3,\n\
         3,D,C,1,1,\n\
         4,C,D,1,1,\n\
         5,D,E,3,3,\n",
    )
}

/// Crossed Srlgs on a diamond: `r1 = {s->a, b->t}`, `r2 = {a->t, s->b}`.
/// No Srlg-disjoint pair exists.
pub fn g3a() -> Network {
    parse(
        "0,s,a,1,1,1\n\
         1,a,t,1,1,2\n\
         2,s,b,1,1,2\n\
         3,b,t,1,1,1\n",
    )
}

/// Trap network: the cheap corridor `A->D->...->E->F` never has a disjoint
/// backup because `{A->D, E->F}` is a conflict set. The only feasible pair
/// uses the expensive links `D->C` and `B->E`. Every link is its own Srlg
/// (label = link id).
pub fn g3b() -> Network {
    parse(
        "0,A,D,1,1,0\n\
         1,D,E,1,1,1\n\
         2,E,F,1,1,2\n\
         3,D,G,1,1,3\n\
         4,G,E,1,1,4\n\
         5,D,H,1,1,5\n\
         6,H,E,1,1,6\n\
         7,A,B,1,1,7\n\
         8,B,E,10,1,8\n\
         9,D,C,10,1,9\n\
         10,C,F,1,1,10\n",
    )
}

/// Square with two node-disjoint `s->t` routes of equal delay and no Srlgs.
pub fn square() -> Network {
    parse(
        "0,s,a,1,1,\n\
         1,a,t,1,1,\n\
         2,s,b,2,1,\n\
         3,b,t,2,1,\n",
    )
}

/// Square whose routes differ in delay by 4, each link its own Srlg.
pub fn uneven_square() -> Network {
    parse(
        "0,s,a,1,1,0\n\
         1,a,t,1,1,1\n\
         2,s,b,1,3,2\n\
         3,b,t,1,3,3\n",
    )
}

/// A single `s->a->t` chain, each link its own Srlg.
pub fn chain() -> Network {
    parse(
        "0,s,a,1,1,0\n\
         1,a,t,1,1,1\n",
    )
}

/// Network realizing the piecewise dual `g(λ)` with breakpoints at 0 and 1
/// for the range `[5,7]` from `A` to `B`.
pub fn lagrangian_example(fan_out: usize) -> Network {
    let mut text = String::from(
        "0,A,C,3,1,\n\
         1,C,B,3,1,\n\
         2,A,D,4,3,\n\
         3,D,B,3,3,\n\
         4,A,E,2,2,\n\
         5,E,B,2,2,\n",
    );
    for i in 0..fan_out {
        let id = 6 + 2 * i;
        text.push_str(&format!("{},A,F{i},2,4,\n{},F{i},B,2,4,\n", id, id + 1));
    }
    parse(&text)
}
