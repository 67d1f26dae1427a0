#ifndef SCMKIT_SCMKIT_HPP
#define SCMKIT_SCMKIT_HPP

#include "scmkit/error.hpp"
#include "scmkit/unicode.hpp"
#include "scmkit/tsv.hpp"
#include "scmkit/corpus.hpp"
#include "scmkit/target_position.hpp"
#include "scmkit/geometry.hpp"
#include "scmkit/disambiguation.hpp"
#include "scmkit/prediction.hpp"
#include "scmkit/clustering.hpp"
#include "scmkit/logreg.hpp"
#include "scmkit/nsd.hpp"
#include "scmkit/scm.hpp"
#include "scmkit/metrics.hpp"

#endif
