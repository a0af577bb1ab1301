#pragma once

#include "oscar/collect.hpp"
#include "oscar/corpus.hpp"
#include "oscar/db_io.hpp"
#include "oscar/detector.hpp"
#include "oscar/error.hpp"
#include "oscar/evalkit.hpp"
#include "oscar/extractor.hpp"
#include "oscar/fingerprint.hpp"
#include "oscar/matching.hpp"
#include "oscar/normalize.hpp"
#include "oscar/pipeline.hpp"
#include "oscar/report.hpp"
#include "oscar/segmenter.hpp"
#include "oscar/signature.hpp"
#include "oscar/tlsh.hpp"
#include "oscar/value_types.hpp"
