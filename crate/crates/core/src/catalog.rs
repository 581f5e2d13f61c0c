//! Small named graphs used throughout the tests, the docs and the CLI data
//! files.

use crate::graph::{Color, ColoredGraph, LineSpec};

/// Two neighboring datasets, `"1"` blue and `"2"` red.
pub fn two_vertex() -> ColoredGraph {
    ColoredGraph::new([("1", Color::Blue), ("2", Color::Red)], [("1", "2")]).expect("static graph")
}

/// The three-voter majority graph on `{1,2}^3`: datasets are neighbors when
/// they differ in one vote, blue when the majority voted 1.
pub fn majority_cube() -> ColoredGraph {
    let ids: Vec<String> = (0..8u8)
        .map(|bits| (0..3).map(|k| if bits >> (2 - k) & 1 == 0 { '1' } else { '2' }).collect())
        .collect();
    let vertices = ids.iter().map(|id| {
        let ones = id.chars().filter(|&c| c == '1').count();
        (id.clone(), if ones >= 2 { Color::Blue } else { Color::Red })
    });
    let mut edges = Vec::new();
    for (i, a) in ids.iter().enumerate() {
        for b in &ids[i + 1..] {
            let diff = a.chars().zip(b.chars()).filter(|(x, y)| x != y).count();
            if diff == 1 {
                edges.push((a.clone(), b.clone()));
            }
        }
    }
    ColoredGraph::new(vertices, edges).expect("static graph")
}

/// Voluntary-participation voting: a vertex is the set of voters who turned
/// out; voters 1 and 2 vote blue, voter 3 votes red, ties go to red.
pub fn voluntary_vote() -> ColoredGraph {
    let vertices = [
        ("1", Color::Blue),
        ("2", Color::Blue),
        ("3", Color::Red),
        ("12", Color::Blue),
        ("13", Color::Red),
        ("23", Color::Red),
        ("123", Color::Blue),
    ];
    let edges = [
        ("1", "12"),
        ("1", "13"),
        ("2", "12"),
        ("2", "23"),
        ("3", "13"),
        ("3", "23"),
        ("12", "123"),
        ("13", "123"),
        ("23", "123"),
    ];
    ColoredGraph::new(vertices, edges).expect("static graph")
}

/// An 18-vertex graph whose boundary graph is the (3,4)-line. Blue vertices
/// are `a b c g h k ℓ`, red ones `d e f i j m n o p q r`.
pub fn eighteen_vertex_example() -> ColoredGraph {
    let blue = ["a", "b", "c", "g", "h", "k", "ℓ"];
    let red = ["d", "e", "f", "i", "j", "m", "n", "o", "p", "q", "r"];
    let vertices = blue.iter().map(|v| (*v, Color::Blue)).chain(red.iter().map(|v| (*v, Color::Red)));
    let edges = [
        ("a", "b"),
        ("b", "g"),
        ("g", "a"),
        ("g", "c"),
        ("c", "h"),
        ("h", "n"),
        ("n", "q"),
        ("q", "ℓ"),
        ("ℓ", "g"),
        ("ℓ", "k"),
        ("q", "m"),
        ("n", "o"),
        ("o", "j"),
        ("j", "f"),
        ("f", "e"),
        ("e", "j"),
        ("j", "d"),
        ("d", "i"),
        ("i", "h"),
        ("o", "p"),
        ("o", "r"),
    ];
    ColoredGraph::new(vertices, edges).expect("static graph")
}

pub fn line(n_blue: usize, n_red: usize) -> ColoredGraph {
    ColoredGraph::line(LineSpec::new(n_blue, n_red).expect("positive line parameters"))
}
