#ifndef GCHLAB_GCHLAB_HPP
#define GCHLAB_GCHLAB_HPP

#include "gchlab/audit.hpp"
#include "gchlab/blowup.hpp"
#include "gchlab/config.hpp"
#include "gchlab/dynamics.hpp"
#include "gchlab/errors.hpp"
#include "gchlab/experiments.hpp"
#include "gchlab/grid.hpp"
#include "gchlab/io.hpp"
#include "gchlab/littlewood_paley.hpp"
#include "gchlab/peakon.hpp"
#include "gchlab/picard.hpp"
#include "gchlab/random.hpp"
#include "gchlab/spectral.hpp"
#include "gchlab/transport.hpp"

#endif  // GCHLAB_GCHLAB_HPP
