pub mod diskmap;
pub mod enumerate;
pub mod homology;
pub mod io;
pub mod render;
pub mod watermelon;
