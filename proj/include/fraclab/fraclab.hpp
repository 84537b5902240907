#pragma once

#include "fraclab/errors.hpp"
#include "fraclab/spectral_core.hpp"
#include "fraclab/dispersion.hpp"
#include "fraclab/curves.hpp"
#include "fraclab/measures.hpp"
#include "fraclab/maximal_lab.hpp"
#include "fraclab/kernel_analysis.hpp"
#include "fraclab/sharpness.hpp"
