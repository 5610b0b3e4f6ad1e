#pragma once

#include "trueset/augment.hpp"
#include "trueset/embed.hpp"
#include "trueset/error.hpp"
#include "trueset/eval.hpp"
#include "trueset/feature_table.hpp"
#include "trueset/imageops.hpp"
#include "trueset/manifest.hpp"
#include "trueset/numeric.hpp"
#include "trueset/pca.hpp"
#include "trueset/png_io.hpp"
#include "trueset/random.hpp"
#include "trueset/raster.hpp"
#include "trueset/select.hpp"
