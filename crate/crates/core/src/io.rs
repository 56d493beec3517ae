//! Plain-text mesh dumps for plotting.

use std::fmt::Write as _;

use crate::mesh::Mesh;

/// Text form of a mesh:
///
/// ```text
/// vertices N triangles M edges E
/// v x y
/// t a b c generation
/// e a b plus minus tag
/// ```
///
/// `minus` is `-1` on the boundary and `tag` is `I`, `D` or `N`.
pub fn mesh_to_string(mesh: &Mesh) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "vertices {} triangles {} edges {}", mesh.n_vertices(), mesh.n_triangles(), mesh.n_edges());
    for v in mesh.vertices() {
        let _ = writeln!(s, "v {:.17e} {:.17e}", v[0], v[1]);
    }
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let _ = writeln!(s, "t {} {} {} {}", tri[0], tri[1], tri[2], mesh.generation(t));
    }
    for e in mesh.edges() {
        let minus = e.minus.map_or(-1, |m| m as i64);
        let tag = e.tag.map_or('I', |t| t.code());
        let _ = writeln!(s, "e {} {} {} {} {}", e.vertices[0], e.vertices[1], e.plus, minus, tag);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::BoundaryTag;

    #[test]
    fn single_square() {
        let m = Mesh::square([0.0, 0.0], [1.0, 1.0], 1, |_| BoundaryTag::Dirichlet).unwrap();
        let s = mesh_to_string(&m);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "vertices 4 triangles 2 edges 5");
        assert_eq!(lines.len(), 1 + 4 + 2 + 5);
        assert_eq!(lines.iter().filter(|l| l.ends_with(" I")).count(), 1);
        assert!(lines[5].starts_with("t ") && lines[5].ends_with(" 0"));
    }
}
