//! DOT and JSON tree renderings of graphs and run artifacts.

mod dot;
mod tree;

pub use self::dot::{read_dot, to_dot, DotError, DotGraph};
pub use self::tree::{from_tree, to_tree, Exportable, TreeError, TREE_VERSION};

use crate::model::Graph;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum RenderFormat {
    #[default]
    Dot,
    Tree,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RenderConfig {
    pub format: RenderFormat,
}

pub fn render(graph: &Graph, cfg: &RenderConfig) -> String {
    match cfg.format {
        RenderFormat::Dot => to_dot(graph),
        RenderFormat::Tree => to_tree(graph),
    }
}
