#pragma once

#include "palmid/codec.hpp"
#include "palmid/degrade.hpp"
#include "palmid/embedding.hpp"
#include "palmid/embeddings_io.hpp"
#include "palmid/errors.hpp"
#include "palmid/extractor.hpp"
#include "palmid/gallery.hpp"
#include "palmid/geometry.hpp"
#include "palmid/image.hpp"
#include "palmid/metrics.hpp"
#include "palmid/quality.hpp"
#include "palmid/reducer.hpp"
#include "palmid/similarity.hpp"
#include "palmid/synthetic.hpp"
