//! Node layouts on scaled 2D domains.

mod domain;
mod front;
mod layout;
mod radius;

pub use domain::{Domain2D, DomainKind, Role, BOUNDARY_EPS};
pub use front::{advancing_front_fill, Rect};
pub use layout::{
    adapted_layout, boundary_nodes, cartesian_layout, nodes_per_axis_for, parse_layout_text,
    sinh_nodes, smooth_layout, smooth_layout_with_count, GridMap, GridMapping, LayoutFile,
    LayoutKind, NodeLayout, SinhMap,
};
pub use radius::{radius, Radius, RadiusParams};
