//! PG(3, q^3) with the hyperbolic quadric X0·X3 = X1·X2 and its polarity,
//! together with the field model PG(V), V = F_(q^6)², used for canonical
//! forms.

mod model;
mod space;

pub use model::{
    bar, model_bilinear, model_line_contains, EndomorphismModel, FieldModel, FieldModelPoint,
    GroupElement,
};
pub use space::{
    bilinear, common_kernel, common_transversal_lines, dot, is_zero_vec, normalize,
    polar_functional, quadratic_form, rank_of, vadd, vscale, vsub, LineProfile, Meet, ProjLine,
    ProjPlane, ProjPoint, Vec4,
};
