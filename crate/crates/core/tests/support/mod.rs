pub mod product_basis;
