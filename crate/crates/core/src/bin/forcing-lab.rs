fn main() { std::process::exit(forcing_lab::cli::main()); }
