fn main() { std::process::exit(gsip_lab::cli::main()) }
