#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace bwsel {

//! Base class for all errors raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//! An argument outside the mathematical domain of an operation (h <= 0, ...).
class DomainError : public Error
{
public:
  using Error::Error;
};

//! Adaptive quadrature did not reach the requested tolerance.
class QuadratureError : public Error
{
public:
  QuadratureError(const std::string& what, double achieved, double requested)
    : Error(what + " (achieved error " + format(achieved) + ", requested " +
            format(requested) + ")")
    , achieved_(achieved)
    , requested_(requested)
  {}

  double achieved() const noexcept { return achieved_; }
  double requested() const noexcept { return requested_; }

private:
  static std::string format(double x)
  {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
  }

  double achieved_;
  double requested_;
};

//! mu2(K) - mu1*(K)^2 <= 0: no local-linear equivalent kernel exists.
class DegenerateKernelError : public Error
{
public:
  using Error::Error;
};

//! A bandwidth selector could not produce a bandwidth.
class SelectionError : public Error
{
public:
  using Error::Error;
};

//! The plug-in pilot estimate of R(f'') was not positive.
class PluginError : public SelectionError
{
public:
  using SelectionError::SelectionError;
};

//! Invalid experiment configuration or command-line input.
class ConfigError : public Error
{
public:
  using Error::Error;
};

} // namespace bwsel
