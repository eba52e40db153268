#ifndef MLMFIT_VERSION_HPP
#define MLMFIT_VERSION_HPP

#define MLMFIT_VERSION "0.1.0"

#endif
