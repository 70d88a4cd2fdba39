use thiserror::Error;

/// RGBA8 raster. Row 0 of `data` is the top row of the picture; shader
/// coordinates have their origin at the bottom-left.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ImageError {
    #[error("image dimensions must be at least 1x1, got {width}x{height}")]
    Empty { width: u32, height: u32 },
    #[error("image data has {actual} bytes, expected {expected} for {width}x{height} RGBA")]
    DataLength { width: u32, height: u32, expected: usize, actual: usize },
}

impl Image {
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Result<Image, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::Empty { width, height });
        }
        let expected = width as usize * height as usize * 4;
        if data.len() != expected {
            return Err(ImageError::DataLength { width, height, expected, actual: data.len() });
        }
        Ok(Image { width, height, data })
    }

    /// Uniformly colored image.
    pub fn filled(width: u32, height: u32, rgba: [u8; 4]) -> Result<Image, ImageError> {
        let n = width as usize * height as usize;
        Image::new(width, height, rgba.repeat(n))
    }

    /// Builds an image from a function of (column, data row).
    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> [u8; 4]) -> Result<Image, ImageError> {
        let mut data = Vec::with_capacity(width as usize * height as usize * 4);
        for row in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, row));
            }
        }
        Image::new(width, height, data)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    /// Pixel at column `x` of data row `row` (row 0 is the top).
    pub fn pixel(&self, x: u32, row: u32) -> [u8; 4] {
        let i = (row as usize * self.width as usize + x as usize) * 4;
        [self.data[i], self.data[i + 1], self.data[i + 2], self.data[i + 3]]
    }

    pub fn set_pixel(&mut self, x: u32, row: u32, rgba: [u8; 4]) {
        let i = (row as usize * self.width as usize + x as usize) * 4;
        self.data[i..i + 4].copy_from_slice(&rgba);
    }

    /// Pixel addressed bottom-up, as shader coordinates see it.
    pub fn texel(&self, i: u32, j: u32) -> [u8; 4] {
        self.pixel(i, self.height - 1 - j)
    }
}
